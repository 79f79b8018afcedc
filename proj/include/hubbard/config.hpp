#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hubbard/evolve.hpp"

namespace hubbard {

// Schema violation, unknown key or malformed JSON.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InitialSpec {
    std::string kind = "appendixA";  // or "snapshot"
    std::string path;
    std::optional<std::size_t> step;  // snapshot step; read from the file when absent
};

struct ManifoldSpec {
    double k1 = 23.0 / 64.0;
    std::size_t resolution = 512;
    std::string state;  // optional snapshot for Bloch coloring
};

struct AnalysisSpec {
    std::string observables;  // defaults to <output_dir>/observables.csv
    std::string fit;          // defaults to <output_dir>/fit.json
    double initial_fraction = 0.1;
    double asymptotic_fraction = 0.3;
    std::optional<std::pair<double, double>> window;
};

struct SweepSpec {
    std::string key;  // dotted config key, e.g. "model.eta"
    std::vector<nlohmann::json> values;
};

struct JobConfig {
    RunConfig run;
    InitialSpec initial;
    std::string output_dir = "out";
    ManifoldSpec manifold;
    AnalysisSpec analysis;
    SweepSpec sweep;
};

// Applies "a.b.c=value" to a JSON object. The value is parsed as JSON when
// possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Validates a JSON document against the schema and fills in defaults.
JobConfig config_from_json(const nlohmann::json& doc);

// Fully resolved document: every key present, parsing it gives the same config.
nlohmann::json config_to_json(const JobConfig& config);

JobConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});
JobConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});

// Git-style object id (SHA-1 of "blob <size>\0" + content), hex encoded.
std::string git_blob_hash(const std::string& content);

// Hash of the resolved config document, output_dir left out.
std::string config_hash(const JobConfig& config);

}  // namespace hubbard
