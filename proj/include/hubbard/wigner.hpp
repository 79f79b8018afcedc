#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hubbard/dispersion.hpp"
#include "hubbard/herm2.hpp"

namespace hubbard {

// Raised when a Wigner matrix leaves 0 <= W <= 1 by more than the tolerance.
class FermiViolation : public std::runtime_error {
public:
    FermiViolation(const std::string& what, std::size_t index, double eigenvalue)
        : std::runtime_error(what), index_(index), eigenvalue_(eigenvalue) {}
    std::size_t index() const noexcept { return index_; }
    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    std::size_t index_;
    double eigenvalue_;
};

inline constexpr double kFermiTolerance = 1e-9;

// Momentum of grid node j: j/n mapped to [-1/2, 1/2).
double grid_momentum(std::size_t j, std::size_t n) noexcept;

// Throws std::invalid_argument unless n is even and >= 8.
void validate_grid_size(std::size_t n);

// Wigner function sampled on the uniform periodic grid; values[j] = W(k_j).
struct WignerState {
    std::vector<Herm2> values;
    double time = 0.0;

    WignerState() = default;
    explicit WignerState(std::size_t n, double t = 0.0) : values(n), time(t) {}
    WignerState(std::vector<Herm2> v, double t) : values(std::move(v)), time(t) {}

    std::size_t size() const noexcept { return values.size(); }
    double momentum(std::size_t j) const noexcept { return grid_momentum(j, values.size()); }

    const Herm2& operator[](std::size_t j) const noexcept { return values[j]; }
    Herm2& operator[](std::size_t j) noexcept { return values[j]; }
};

// Builds a state from a function of momentum.
WignerState sample_state(std::size_t n, const std::function<Herm2(double)>& w);

// The reference initial condition W(k, 0).
Herm2 initial_wigner(double k);
WignerState initial_state(std::size_t n);

// Throws FermiViolation if any eigenvalue lies outside [-tol, 1 + tol].
void check_fermi(const WignerState& state, double tol = kFermiTolerance);

// Componentwise periodic cubic interpolation through k_{j-1}..k_{j+2}.
// Divided differences are computed once on construction.
class Interpolant {
public:
    explicit Interpolant(const WignerState& state);

    Herm2 operator()(double k) const noexcept;
    std::size_t size() const noexcept { return nodes_.size(); }

private:
    struct NodeCoefficients {
        Herm2 f;   // f_j
        Herm2 d1;  // f_{j+1} - f_j
        Herm2 c2;  // (f_{j+1} - 2 f_j + f_{j-1}) / 2
        Herm2 c3;  // (f_{j+2} - 3 f_{j+1} + 3 f_j - f_{j-1}) / 6
    };
    std::vector<NodeCoefficients> nodes_;
};

Herm2 interpolate(const WignerState& state, double k);

// (1/n) sum_j W_j
Herm2 conserved_spin(const WignerState& state);
// (1/n) sum_j omega(k_j) tr W_j
double conserved_energy(const WignerState& state, const DispersionModel& model);
// (1/n) sum_j g(k_j) tr W_j
double trace_moment(const WignerState& state, const std::function<double(double)>& g);

// d_j = tr W(k_j) - tr W(1/2 - k_j); requires n % 4 == 0.
std::vector<double> odd_trace_profile(const WignerState& state);
// Index of the node at 1/2 - k_j.
std::size_t reflected_index(std::size_t j, std::size_t n) noexcept;

// Fermi gas entropy; eigenvalues are clamped to [0, 1] after the Fermi check.
double entropy(const WignerState& state);

// sqrt((1/n) sum_j ||a_j - b_j||_HS^2)
double hs_distance(const WignerState& a, const WignerState& b);
// max_j ||a_j||_HS
double max_hs_norm(std::span<const Herm2> values);

}  // namespace hubbard
