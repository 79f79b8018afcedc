#include "hubbard/config.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hubbard {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

double get_number(const json& j, const std::string& key, const std::string& where, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + key + " must be a number");
    return v.get<double>();
}

std::size_t get_count(const json& j, const std::string& key, const std::string& where, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    if (v.is_number_float() && v.get<double>() >= 0.0 && std::floor(v.get<double>()) == v.get<double>()) {
        return static_cast<std::size_t>(v.get<double>());
    }
    throw ConfigError(where + key + " must be a non-negative integer");
}

std::string get_string(const json& j, const std::string& key, const std::string& where, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(where + key + " must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& key, const std::string& where, bool fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(where + key + " must be true or false");
    return v.get<bool>();
}

DispersionModel model_from_json(const json& j) {
    require_object(j, "model");
    reject_unknown(j, "model", {"kind", "eta", "zeta", "m"});
    if (!j.contains("kind")) throw ConfigError("model.kind is required");
    DispersionModel m;
    try {
        m.kind = dispersion_kind_from_string(get_string(j, "kind", "model.", ""));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model.kind: ") + e.what());
    }
    m.eta = get_number(j, "eta", "model.", 0.0);
    m.zeta = get_number(j, "zeta", "model.", 1.0);
    m.m = static_cast<int>(get_count(j, "m", "model.", 1));
    if (m.kind == DispersionKind::nnn && !j.contains("eta")) throw ConfigError("model.eta is required for nnn");
    if (m.kind == DispersionKind::exp && !j.contains("zeta")) throw ConfigError("model.zeta is required for exp");
    if (m.kind == DispersionKind::mth && !j.contains("m")) throw ConfigError("model.m is required for mth");
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    return m;
}

json model_to_json(const DispersionModel& m) {
    json j{{"kind", to_string(m.kind)}};
    if (m.kind == DispersionKind::nnn) j["eta"] = m.eta;
    if (m.kind == DispersionKind::exp) j["zeta"] = m.zeta;
    if (m.kind == DispersionKind::mth) j["m"] = m.m;
    return j;
}

}  // namespace

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

JobConfig config_from_json(const json& doc) {
    require_object(doc, "config");
    reject_unknown(doc, "", {"model", "n", "epsilon", "dt", "t_end", "observable_stride", "snapshot_stride",
                             "reduced_mode", "initial", "output_dir", "manifold", "analysis", "sweep"});
    if (!doc.contains("model")) throw ConfigError("model is required");

    JobConfig c;
    RunConfig& r = c.run;
    r.model = model_from_json(doc.at("model"));
    r.n = get_count(doc, "n", "", r.n);
    r.epsilon = get_number(doc, "epsilon", "", r.epsilon);
    r.dt = get_number(doc, "dt", "", r.dt);
    r.t_end = get_number(doc, "t_end", "", r.t_end);
    r.observable_stride = get_count(doc, "observable_stride", "", r.observable_stride);
    r.snapshot_stride = get_count(doc, "snapshot_stride", "", r.snapshot_stride);
    r.reduced_mode = get_bool(doc, "reduced_mode", "", r.reduced_mode);
    c.output_dir = get_string(doc, "output_dir", "", c.output_dir);
    try {
        r.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (doc.contains("initial")) {
        const json& j = doc.at("initial");
        require_object(j, "initial");
        reject_unknown(j, "initial", {"kind", "path", "step"});
        c.initial.kind = get_string(j, "kind", "initial.", c.initial.kind);
        c.initial.path = get_string(j, "path", "initial.", "");
        if (j.contains("step")) c.initial.step = get_count(j, "step", "initial.", 0);
        if (c.initial.kind != "appendixA" && c.initial.kind != "snapshot") {
            throw ConfigError("initial.kind must be \"appendixA\" or \"snapshot\"");
        }
        if (c.initial.kind == "snapshot" && c.initial.path.empty()) throw ConfigError("initial.path is required for snapshots");
    }

    if (doc.contains("manifold")) {
        const json& j = doc.at("manifold");
        require_object(j, "manifold");
        reject_unknown(j, "manifold", {"k1", "resolution", "state"});
        c.manifold.k1 = get_number(j, "k1", "manifold.", c.manifold.k1);
        c.manifold.resolution = get_count(j, "resolution", "manifold.", c.manifold.resolution);
        c.manifold.state = get_string(j, "state", "manifold.", "");
        if (c.manifold.resolution == 0) throw ConfigError("manifold.resolution must be >= 1");
    }

    if (doc.contains("analysis")) {
        const json& j = doc.at("analysis");
        require_object(j, "analysis");
        reject_unknown(j, "analysis", {"observables", "fit", "initial_fraction", "asymptotic_fraction", "window"});
        AnalysisSpec& a = c.analysis;
        a.observables = get_string(j, "observables", "analysis.", "");
        a.fit = get_string(j, "fit", "analysis.", "");
        a.initial_fraction = get_number(j, "initial_fraction", "analysis.", a.initial_fraction);
        a.asymptotic_fraction = get_number(j, "asymptotic_fraction", "analysis.", a.asymptotic_fraction);
        for (double f : {a.initial_fraction, a.asymptotic_fraction}) {
            if (!(f > 0.0 && f <= 1.0)) throw ConfigError("analysis fractions must lie in (0, 1]");
        }
        if (j.contains("window") && !j.at("window").is_null()) {
            const json& w = j.at("window");
            if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
                throw ConfigError("analysis.window must be [t_lo, t_hi]");
            }
            a.window = std::make_pair(w[0].get<double>(), w[1].get<double>());
            if (!(a.window->second > a.window->first)) throw ConfigError("analysis.window is empty");
        }
    }

    if (doc.contains("sweep")) {
        const json& j = doc.at("sweep");
        require_object(j, "sweep");
        reject_unknown(j, "sweep", {"key", "values"});
        c.sweep.key = get_string(j, "key", "sweep.", "");
        if (j.contains("values")) {
            if (!j.at("values").is_array()) throw ConfigError("sweep.values must be an array");
            for (const json& v : j.at("values")) c.sweep.values.push_back(v);
        }
    }
    return c;
}

json config_to_json(const JobConfig& c) {
    const RunConfig& r = c.run;
    json initial{{"kind", c.initial.kind}};
    if (!c.initial.path.empty()) initial["path"] = c.initial.path;
    if (c.initial.step) initial["step"] = *c.initial.step;
    json analysis{{"observables", c.analysis.observables},
                  {"fit", c.analysis.fit},
                  {"initial_fraction", c.analysis.initial_fraction},
                  {"asymptotic_fraction", c.analysis.asymptotic_fraction}};
    analysis["window"] = c.analysis.window ? json::array({c.analysis.window->first, c.analysis.window->second}) : json();
    return json{{"model", model_to_json(r.model)},
                {"n", r.n},
                {"epsilon", r.epsilon},
                {"dt", r.dt},
                {"t_end", r.t_end},
                {"observable_stride", r.observable_stride},
                {"snapshot_stride", r.snapshot_stride},
                {"reduced_mode", r.reduced_mode},
                {"initial", initial},
                {"output_dir", c.output_dir},
                {"manifold", {{"k1", c.manifold.k1}, {"resolution", c.manifold.resolution}, {"state", c.manifold.state}}},
                {"analysis", analysis},
                {"sweep", {{"key", c.sweep.key}, {"values", c.sweep.values}}}};
}

JobConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("malformed JSON in config");
    for (const std::string& o : overrides) apply_override(doc, o);
    return config_from_json(doc);
}

JobConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

std::string git_blob_hash(const std::string& content) {
    std::string blob = "blob " + std::to_string(content.size());
    blob.push_back('\0');
    blob += content;
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned char b : digest) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 15]);
    }
    return out;
}

std::string config_hash(const JobConfig& config) {
    json doc = config_to_json(config);
    doc.erase("output_dir");
    return git_blob_hash(doc.dump());
}

}  // namespace hubbard
