#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hubbard/collision.hpp"
#include "hubbard/evolve.hpp"
#include "hubbard/wigner.hpp"

namespace hubbard {

// Minimum distance of eigenvalues from {0, 1} for the matrix logarithm.
inline constexpr double kLogMargin = 1e-8;

class BoundaryEigenvalue : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// sigma = -(1/n) sum_j tr[(ln W_j - ln W~_j) C_j] for a given collision output.
// Throws BoundaryEigenvalue if an eigenvalue lies within kLogMargin of 0 or 1.
double entropy_production(const WignerState& state, const std::vector<Herm2>& derivative);

double entropy_production(const WignerState& state, const CollisionEngine& engine, bool reduced = false);

struct DecayFit {
    double kappa = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double residual = 0.0;  // RMS of the log-linear fit
    double s_inf = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

// Least squares of ln(s_inf - S) against t over [t_lo, t_hi]; kappa = -slope.
// Records with s_inf - S <= 1e-12 are skipped. Throws std::invalid_argument
// with fewer than 5 usable records.
DecayFit decay_fit(std::span<const Record> records, double s_inf, double t_lo, double t_hi);

struct TimescaleReport {
    DecayFit initial;     // first 10% of records, at least 5
    DecayFit asymptotic;  // last 30% of records, at least 5
};

TimescaleReport timescale_report(std::span<const Record> records, double s_inf, double initial_fraction = 0.1,
                                 double asymptotic_fraction = 0.3);

// Conserved quantities of a reference state, used to measure relative drift.
// Spin entries are scaled by ||N||_HS, energy by |E| and the g-moments by
// (1/n) sum_j |g(k_j) tr W_j|, so near-zero entries do not blow up the ratio.
class ConservationBaseline {
public:
    ConservationBaseline(const WignerState& reference, const DispersionModel& model);
    DriftReport drift(const WignerState& state) const;

private:
    DispersionModel model_;
    Herm2 spin_;
    double spin_scale_;
    double energy_;
    double energy_scale_;
    std::vector<double> g_;
    std::vector<double> g_scale_;
};

// g(k) = cos(2 pi (2p + 1) k): extra invariants of the nearest model.
double odd_harmonic(int p, double k) noexcept;

}  // namespace hubbard
