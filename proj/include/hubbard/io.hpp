#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hubbard/evolve.hpp"
#include "hubbard/manifold.hpp"
#include "hubbard/wigner.hpp"

namespace hubbard {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest representation that parses back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);

// CSV files start with "# config_hash=<hash>"; readers skip lines starting with '#'.
class ObservablesWriter {
public:
    ObservablesWriter(const std::string& path, const std::string& hash);
    void write(const Record& r);

private:
    std::ofstream out_;
    std::string path_;
};

void write_observables(const std::string& path, const std::vector<Record>& records, const std::string& hash);
std::vector<Record> read_observables(const std::string& path);

struct Snapshot {
    WignerState state;
    std::optional<std::size_t> step;
};

void write_snapshot(const std::string& path, const WignerState& state, std::size_t step, const std::string& hash);
Snapshot read_snapshot(const std::string& path);

void write_manifold(const std::string& path, const std::vector<ManifoldRecord>& records, const std::string& hash);
void write_slice(const std::string& path, const std::vector<SlicePoint>& points, const std::string& hash);

void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);

}  // namespace hubbard
