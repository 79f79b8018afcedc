#include "hubbard/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hubbard/analysis.hpp"

namespace hubbard {

void RunConfig::validate() const {
    model.validate();
    validate_grid_size(n);
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be > 0");
    if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("dt must lie in (0, 0.1]");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
    if (observable_stride == 0) throw std::invalid_argument("observable_stride must be >= 1");
    if (snapshot_stride == 0) throw std::invalid_argument("snapshot_stride must be >= 1");
}

std::size_t RunConfig::total_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

void DriftReport::absorb(const DriftReport& other) {
    spin = std::max(spin, other.spin);
    energy = std::max(energy, other.energy);
    if (g.size() < other.g.size()) g.resize(other.g.size(), 0.0);
    for (std::size_t i = 0; i < other.g.size(); ++i) g[i] = std::max(g[i], other.g[i]);
}

double DriftReport::max() const {
    double m = std::max(spin, energy);
    for (double v : g) m = std::max(m, v);
    return m;
}

CollisionOutput rhs(const WignerState& state, const RunConfig& cfg, const CollisionEngine& engine) {
    return cfg.reduced_mode ? engine.dissipative_diag(state) : engine.collision(state);
}

namespace {

WignerState advance(const WignerState& base, double h, const std::vector<Herm2>& c) {
    WignerState out = base;
    for (std::size_t j = 0; j < out.size(); ++j) out[j].add_scaled(h, c[j]);
    return out;
}

void verify(const WignerState& state, double dt, const char* stage) {
    try {
        check_fermi(state);
    } catch (const FermiViolation& e) {
        throw FermiViolation(std::string(e.what()) + " after " + stage + " at t = " + std::to_string(state.time) +
                                 " with dt = " + std::to_string(dt) + "; try a smaller dt",
                             e.index(), e.eigenvalue());
    }
}

Record measure(const WignerState& state, const WignerState& initial, const RunConfig& cfg, std::size_t step,
               const std::vector<Herm2>& c) {
    Record r;
    r.step = step;
    r.t = state.time;
    r.entropy = entropy(state);
    r.sigma = entropy_production(state, c);
    r.energy = conserved_energy(state, cfg.model);
    r.spin = conserved_spin(state);
    r.odd_trace_max = std::numeric_limits<double>::quiet_NaN();
    if (state.size() % 4 == 0) {
        double m = 0.0;
        for (double d : odd_trace_profile(state)) m = std::max(m, std::abs(d));
        r.odd_trace_max = m;
    }
    r.hs_dist0 = hs_distance(state, initial);
    return r;
}

}  // namespace

WignerState step_midpoint(const WignerState& state, const RunConfig& cfg, const CollisionEngine& engine,
                          const std::vector<Herm2>* c0) {
    std::vector<Herm2> first;
    if (c0 == nullptr) {
        first = rhs(state, cfg, engine).derivative;
        c0 = &first;
    }
    WignerState half = advance(state, 0.5 * cfg.dt, *c0);
    half.time = state.time + 0.5 * cfg.dt;
    verify(half, cfg.dt, "the half step");
    const CollisionOutput c_half = rhs(half, cfg, engine);
    WignerState next = advance(state, cfg.dt, c_half.derivative);
    next.time = state.time + cfg.dt;
    for (const Herm2& w : next.values) {
        if (!w.is_finite()) throw std::runtime_error("non-finite Wigner matrix at t = " + std::to_string(next.time));
    }
    verify(next, cfg.dt, "the full step");
    return next;
}

RunResult run(const RunConfig& cfg, const WignerState& initial, const CollisionEngine& engine, const RunHooks& hooks,
              std::size_t first_step) {
    cfg.validate();
    if (initial.size() != cfg.n) throw std::invalid_argument("initial state size does not match the config");
    check_fermi(initial);

    const std::size_t last_step = cfg.total_steps();
    RunResult result;
    const ConservationBaseline baseline(initial, cfg.model);
    WignerState state = initial;
    state.time = static_cast<double>(first_step) * cfg.dt;
    const WignerState reference = state;

    for (std::size_t step = first_step;; ++step) {
        const bool final = step >= last_step;
        const bool record = final || step % cfg.observable_stride == 0;
        const bool snapshot = final || step % cfg.snapshot_stride == 0;
        if (snapshot && hooks.on_snapshot) hooks.on_snapshot(step, state);

        std::vector<Herm2> c0;
        if (record || !final) c0 = rhs(state, cfg, engine).derivative;
        if (record) {
            const Record r = measure(state, reference, cfg, step, c0);
            result.drift.absorb(baseline.drift(state));
            if (hooks.on_record) hooks.on_record(r);
            result.records.push_back(r);
        }
        if (final) break;
        state = step_midpoint(state, cfg, engine, &c0);
        // Keep time an exact multiple of dt so resumed runs line up bit for bit.
        state.time = static_cast<double>(step + 1) * cfg.dt;
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace hubbard
