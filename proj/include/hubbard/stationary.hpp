#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hubbard/dispersion.hpp"
#include "hubbard/herm2.hpp"
#include "hubbard/wigner.hpp"

namespace hubbard {

using Spinor = std::array<std::complex<double>, 2>;

// Orthonormal pair; column 0 belongs to the larger density.
struct SpinBasis {
    std::array<Spinor, 2> vectors{Spinor{1.0, 0.0}, Spinor{0.0, 1.0}};

    // <a|W|b> components of w in this basis.
    Herm2 to_basis(const Herm2& w) const noexcept;
    // Inverse of to_basis.
    Herm2 from_basis(const Herm2& w) const noexcept;
    // max |<a|b> - delta_ab|
    double orthonormality_error() const noexcept;
};

struct SpinEigen {
    SpinBasis basis;
    double n_up = 0.0;
    double n_dn = 0.0;
    bool degenerate = false;  // standard basis returned
};

// Eigenvectors with the first nonzero component real and positive; n_up >= n_dn.
SpinEigen spin_eigenbasis(const Herm2& spin);

// Diagonal part of every W_j in the given basis, expressed back in the standard basis.
WignerState project_diagonal(const WignerState& state, const SpinBasis& basis);

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double fermi_dirac(double x) noexcept { return 1.0 / (std::exp(x) + 1.0); }

struct ThermalParams {
    double beta = 0.0;
    double mu_up = 0.0;
    double mu_dn = 0.0;
    SpinBasis basis;
    bool infinite_temperature = false;  // beta = 0 with half filling
    int iterations = 0;
    double residual = 0.0;
};

// Solves (1/n) sum_j FD(beta (ω_j - mu_s)) = n_s and
// (1/n) sum_j sum_s ω_j FD(beta (ω_j - mu_s)) = energy on the n-point grid.
ThermalParams thermal_fit(const DispersionModel& model, double n_up, double n_dn, double energy, std::size_t n);

// Fit to the conserved quantities of a state, basis included.
ThermalParams thermal_fit(const WignerState& state, const DispersionModel& model);

WignerState thermal_state(const ThermalParams& params, const DispersionModel& model, std::size_t n);

struct NonThermalParams {
    std::vector<double> f;  // on the grid, f(k_j) = -f(1/2 - k_j)
    double a_up = 0.0;
    double a_dn = 0.0;
    SpinBasis basis;
    int iterations = 0;
    double residual = 0.0;
};

// Stationary state of the nearest model with the odd-trace profile and spin
// densities of `initial`. Requires n % 4 == 0.
NonThermalParams nonthermal_fit(const WignerState& initial);

// Same, from the target profile d_j and densities directly.
NonThermalParams nonthermal_fit(const std::vector<double>& odd_profile, double n_up, double n_dn);

WignerState nonthermal_state(const NonThermalParams& params);

}  // namespace hubbard
