#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hubbard/collision.hpp"
#include "hubbard/dispersion.hpp"
#include "hubbard/wigner.hpp"

namespace hubbard {

struct RunConfig {
    DispersionModel model;
    std::size_t n = 128;
    double epsilon = 0.02;
    double dt = 0.01;
    double t_end = 20.0;
    std::size_t observable_stride = 10;
    std::size_t snapshot_stride = 1000;
    bool reduced_mode = false;  // evolve with dissipative_diag only
    unsigned threads = 1;

    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
    std::size_t total_steps() const;
};

// One row of the observables table.
struct Record {
    std::size_t step = 0;
    double t = 0.0;
    double entropy = 0.0;
    double sigma = 0.0;  // entropy production
    double energy = 0.0;
    Herm2 spin;
    double odd_trace_max = 0.0;  // max_j |d_j|, NaN when n % 4 != 0
    double hs_dist0 = 0.0;       // distance to the initial state
};

// Largest relative drift of the conserved quantities seen along a run.
struct DriftReport {
    double spin = 0.0;    // max entry drift / ||N(0)||_HS
    double energy = 0.0;  // / |E(0)|
    std::vector<double> g;  // nearest model only: cos(2 pi (2p+1) k), p = 0, 1, 2

    void absorb(const DriftReport& other);
    double max() const;
};

// Collision right-hand side selected by cfg.reduced_mode.
CollisionOutput rhs(const WignerState& state, const RunConfig& cfg, const CollisionEngine& engine);

// W(t + dt) = W + dt C[W + dt/2 C[W]]. If c0 is given it must hold C[W] and
// saves one evaluation. Throws FermiViolation (with a hint to reduce dt) when
// the result leaves 0 <= W <= 1.
WignerState step_midpoint(const WignerState& state, const RunConfig& cfg, const CollisionEngine& engine,
                          const std::vector<Herm2>* c0 = nullptr);

struct RunResult {
    std::vector<Record> records;
    DriftReport drift;
    WignerState final_state;
};

struct RunHooks {
    std::function<void(const Record&)> on_record;
    std::function<void(std::size_t step, const WignerState&)> on_snapshot;
};

// Steps from `initial` (taken to be step `first_step`) until t_end. Records
// are emitted at every observable_stride and at the final step, snapshots at
// every snapshot_stride and at the final step.
RunResult run(const RunConfig& cfg, const WignerState& initial, const CollisionEngine& engine,
              const RunHooks& hooks = {}, std::size_t first_step = 0);

}  // namespace hubbard
