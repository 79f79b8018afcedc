#include "hubbard/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace hubbard {

namespace {

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    return in;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_double(const std::string& s, const std::string& path) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("bad number '" + s + "' in '" + path + "'");
    return v;
}

constexpr const char* kObservablesHeader = "t,S,sigma,E,N_uu,N_dd,ReN_ud,ImN_ud,odd_trace_max,hs_dist0";

std::string observables_row(const Record& r) {
    std::string row;
    for (double v : {r.t, r.entropy, r.sigma, r.energy, r.spin.uu, r.spin.dd, r.spin.re, r.spin.im, r.odd_trace_max,
                     r.hs_dist0}) {
        if (!row.empty()) row.push_back(',');
        row += format_double(v);
    }
    row.push_back('\n');
    return row;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
    return std::string(buf, ptr);
}

ObservablesWriter::ObservablesWriter(const std::string& path, const std::string& hash)
    : out_(open_output(path)), path_(path) {
    out_ << "# config_hash=" << hash << '\n' << kObservablesHeader << '\n';
    finish(out_, path_);
}

void ObservablesWriter::write(const Record& r) {
    out_ << observables_row(r);
    finish(out_, path_);
}

void write_observables(const std::string& path, const std::vector<Record>& records, const std::string& hash) {
    ObservablesWriter w(path, hash);
    for (const Record& r : records) w.write(r);
}

std::vector<Record> read_observables(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<Record> out;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kObservablesHeader) throw IoError("unexpected observables header in '" + path + "'");
            header = true;
            continue;
        }
        const std::vector<std::string> c = split(line);
        if (c.size() != 10) throw IoError("observables row with " + std::to_string(c.size()) + " columns in '" + path + "'");
        Record r;
        r.t = parse_double(c[0], path);
        r.entropy = parse_double(c[1], path);
        r.sigma = parse_double(c[2], path);
        r.energy = parse_double(c[3], path);
        r.spin = {parse_double(c[4], path), parse_double(c[5], path), parse_double(c[6], path), parse_double(c[7], path)};
        r.odd_trace_max = parse_double(c[8], path);
        r.hs_dist0 = parse_double(c[9], path);
        r.step = out.size();
        out.push_back(r);
    }
    if (!header) throw IoError("no observables header in '" + path + "'");
    return out;
}

void write_snapshot(const std::string& path, const WignerState& state, std::size_t step, const std::string& hash) {
    std::ofstream out = open_output(path);
    out << "# config_hash=" << hash << '\n'
        << "# step=" << step << '\n'
        << "# t=" << format_double(state.time) << '\n'
        << "k,W_uu,W_dd,ReW_ud,ImW_ud\n";
    // Rows in ascending k: the negative half of the grid comes first.
    const std::size_t n = state.size();
    for (std::size_t row = 0; row < n; ++row) {
        const std::size_t j = (row + n / 2) % n;
        const Herm2& w = state[j];
        out << format_double(state.momentum(j)) << ',' << format_double(w.uu) << ',' << format_double(w.dd) << ','
            << format_double(w.re) << ',' << format_double(w.im) << '\n';
    }
    finish(out, path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in = open_input(path);
    Snapshot snap;
    std::vector<std::pair<double, Herm2>> rows;
    double t = 0.0;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# step=", 0) == 0) snap.step = std::stoull(line.substr(7));
            if (line.rfind("# t=", 0) == 0) t = parse_double(line.substr(4), path);
            continue;
        }
        if (!header) {
            if (line != "k,W_uu,W_dd,ReW_ud,ImW_ud") throw IoError("unexpected snapshot header in '" + path + "'");
            header = true;
            continue;
        }
        const std::vector<std::string> c = split(line);
        if (c.size() != 5) throw IoError("snapshot row with " + std::to_string(c.size()) + " columns in '" + path + "'");
        rows.emplace_back(parse_double(c[0], path), Herm2{parse_double(c[1], path), parse_double(c[2], path),
                                                          parse_double(c[3], path), parse_double(c[4], path)});
    }
    const std::size_t n = rows.size();
    if (n == 0) throw IoError("empty snapshot '" + path + "'");
    std::vector<Herm2> values(n);
    std::vector<bool> seen(n, false);
    for (const auto& [k, w] : rows) {
        const double x = k * static_cast<double>(n);
        const auto node = static_cast<long long>(std::llround(x));
        if (std::abs(x - static_cast<double>(node)) > 1e-6) throw IoError("snapshot momentum off the grid in '" + path + "'");
        const auto j = static_cast<std::size_t>(((node % static_cast<long long>(n)) + static_cast<long long>(n)) %
                                                static_cast<long long>(n));
        if (seen[j]) throw IoError("duplicate snapshot momentum in '" + path + "'");
        seen[j] = true;
        values[j] = w;
    }
    snap.state = WignerState(std::move(values), t);
    return snap;
}

void write_manifold(const std::string& path, const std::vector<ManifoldRecord>& records, const std::string& hash) {
    std::ofstream out = open_output(path);
    const bool colored = !records.empty() && records.front().bloch.has_value();
    out << "# config_hash=" << hash << '\n' << "k1,k3,k4,branch";
    if (colored) out << ",bx,by,bz";
    out << '\n';
    for (const ManifoldRecord& r : records) {
        out << format_double(r.k1) << ',' << format_double(r.k3) << ',' << format_double(r.k4) << ','
            << to_string(r.branch);
        if (colored && r.bloch) {
            for (double v : *r.bloch) out << ',' << format_double(v);
        }
        out << '\n';
    }
    finish(out, path);
}

void write_slice(const std::string& path, const std::vector<SlicePoint>& points, const std::string& hash) {
    std::ofstream out = open_output(path);
    out << "# config_hash=" << hash << '\n' << "k3,k4,contour\n";
    for (const SlicePoint& p : points) out << format_double(p.k3) << ',' << format_double(p.k4) << ',' << p.contour << '\n';
    finish(out, path);
}

void write_json(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in = open_input(path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw IoError("malformed JSON in '" + path + "'");
    return doc;
}

}  // namespace hubbard
