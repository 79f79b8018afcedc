#include "hubbard/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hubbard {

double entropy_production(const WignerState& state, const std::vector<Herm2>& derivative) {
    if (derivative.size() != state.size()) throw std::invalid_argument("entropy_production: size mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < state.size(); ++j) {
        const auto [lo, hi] = eig2(state[j]);
        if (lo < kLogMargin || hi > 1.0 - kLogMargin) {
            throw BoundaryEigenvalue("entropy_production: eigenvalue at the boundary of [0, 1] at grid index " +
                                     std::to_string(j));
        }
        const Herm2 logit = spectral_map(state[j], [](double x) { return std::log(x) - std::log1p(-x); });
        sum += trace_prod(logit, derivative[j]);
    }
    return -sum / static_cast<double>(state.size());
}

double entropy_production(const WignerState& state, const CollisionEngine& engine, bool reduced) {
    const CollisionOutput c = reduced ? engine.dissipative_diag(state) : engine.collision(state);
    return entropy_production(state, c.derivative);
}

DecayFit decay_fit(std::span<const Record> records, double s_inf, double t_lo, double t_hi) {
    if (!(t_hi >= t_lo)) throw std::invalid_argument("decay_fit: empty window");
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t count = 0;
    std::vector<std::pair<double, double>> points;
    for (const Record& r : records) {
        if (r.t < t_lo || r.t > t_hi) continue;
        const double gap = s_inf - r.entropy;
        if (!(gap > 1e-12)) continue;
        const double y = std::log(gap);
        points.emplace_back(r.t, y);
        st += r.t;
        sy += y;
        stt += r.t * r.t;
        sty += r.t * y;
        ++count;
    }
    if (count < 5) {
        throw std::invalid_argument("decay_fit: " + std::to_string(count) + " usable records in window, need 5");
    }
    const double m = static_cast<double>(count);
    const double denom = m * stt - st * st;
    if (!(denom > 0.0)) throw std::invalid_argument("decay_fit: degenerate time window");
    const double slope = (m * sty - st * sy) / denom;
    const double intercept = (sy - slope * st) / m;
    double ss = 0.0;
    for (const auto& [t, y] : points) {
        const double e = y - (intercept + slope * t);
        ss += e * e;
    }
    DecayFit fit;
    fit.kappa = -slope;
    fit.t_lo = points.front().first;
    fit.t_hi = points.back().first;
    fit.residual = std::sqrt(ss / m);
    fit.s_inf = s_inf;
    fit.intercept = intercept;
    fit.points = count;
    return fit;
}

TimescaleReport timescale_report(std::span<const Record> records, double s_inf, double initial_fraction,
                                 double asymptotic_fraction) {
    if (records.empty()) throw std::invalid_argument("timescale_report: no records");
    const std::size_t count = records.size();
    const std::size_t floor = std::min<std::size_t>(5, count);
    const auto head = std::max(floor, static_cast<std::size_t>(std::ceil(initial_fraction * count)));
    const auto tail = std::max(floor, static_cast<std::size_t>(std::ceil(asymptotic_fraction * count)));
    TimescaleReport report;
    report.initial = decay_fit(records, s_inf, records.front().t, records[head - 1].t);
    report.asymptotic = decay_fit(records, s_inf, records[count - tail].t, records.back().t);
    return report;
}

double odd_harmonic(int p, double k) noexcept { return std::cos(kTwoPi * (2 * p + 1) * k); }

ConservationBaseline::ConservationBaseline(const WignerState& reference, const DispersionModel& model)
    : model_(model), spin_(conserved_spin(reference)), energy_(conserved_energy(reference, model)) {
    spin_scale_ = std::sqrt(hs_norm2(spin_));
    energy_scale_ = std::abs(energy_);
    if (model.kind == DispersionKind::nearest) {
        for (int p = 0; p < 3; ++p) {
            g_.push_back(trace_moment(reference, [p](double k) { return odd_harmonic(p, k); }));
            g_scale_.push_back(
                trace_moment(reference, [p](double k) { return std::abs(odd_harmonic(p, k)); }));
        }
    }
}

namespace {

double relative(double change, double scale) { return scale > 0.0 ? std::abs(change) / scale : std::abs(change); }

}  // namespace

DriftReport ConservationBaseline::drift(const WignerState& state) const {
    DriftReport r;
    const Herm2 d = conserved_spin(state) - spin_;
    const double entry = std::max({std::abs(d.uu), std::abs(d.dd), std::abs(d.re), std::abs(d.im)});
    r.spin = relative(entry, spin_scale_);
    r.energy = relative(conserved_energy(state, model_) - energy_, energy_scale_);
    for (std::size_t p = 0; p < g_.size(); ++p) {
        const int harmonic = static_cast<int>(p);
        const double value = trace_moment(state, [harmonic](double k) { return odd_harmonic(harmonic, k); });
        r.g.push_back(relative(value - g_[p], g_scale_[p]));
    }
    return r;
}

}  // namespace hubbard
