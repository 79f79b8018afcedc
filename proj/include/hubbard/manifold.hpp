#pragma once

// Quadrature atoms on the collision manifold {k1 + k2 = k3 + k4 mod 1, ω̄ = 0}.
//
// The nontrivial contours are parametrized by the difference coordinates
// dk12 = (k1 - k2)/2 and dk34 = (k3 - k4)/2 on a uniform n x n grid; at each
// grid cell the sum momentum s12 = k1 + k2 is solved from the ω̄_add factor.
// The trivial contours k3 = k1 (gamma1) and k4 = k1 (gamma2) are handled
// separately on the plain k-grid.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hubbard/dispersion.hpp"
#include "hubbard/wigner.hpp"

namespace hubbard {

enum class Branch : std::uint8_t { diag_plus, diag_minus, ellip_plus, ellip_minus, exp_plus, exp_minus };

std::string to_string(Branch branch);
bool is_ellip(Branch branch) noexcept;

struct BranchRoot {
    Branch branch;
    double s12;
};

// Energy-matching split of a contribution at k_target between grid nodes
// index and index + 1 (mod n).
struct Deposit {
    std::uint32_t index = 0;
    double nu = 1.0;
};

struct ManifoldSample {
    double dk12 = 0.0;
    double dk34 = 0.0;
    double s12 = 0.0;
    Branch branch = Branch::diag_plus;
    // pi/2 * mollified |d ω̄/d s12|^-1 / n^2. The 1/2 accounts for s12 ranging
    // over [-1, 1), which covers the (k1, k2) torus twice.
    double weight = 0.0;
    std::array<double, 4> k{};  // k1..k4 reduced to [-1/2, 1/2)
    Deposit deposit;            // split of k1 onto the grid
};

// Exchange contour k3 = k2, k4 = k1 at grid nodes.
struct Gamma2Sample {
    std::uint32_t i1 = 0;
    std::uint32_t i2 = 0;
    double weight = 0.0;  // pi/n * ((ω'(k1) - ω'(k2))^2 + eps^2)^-1/2
};

struct ManifoldDiagnostics {
    std::size_t nu_out_of_range = 0;   // deposits with nu outside [0, 1]
    std::size_t cubic_anomalies = 0;   // exp cells with != 1 admissible cubic root
    double max_omega_bar_residual = 0.0;
};

// Roots s12 in [-1, 1) of ω̄_add,eta = 0; both signs of every root.
std::vector<BranchRoot> solve_s12_nnn(double eta, double dk12, double dk34);

// Real roots of the cubic in c = cos(pi s12) with |c| <= 1, returned in ascending order.
std::vector<double> exp_cubic_admissible_roots(double zeta, double dk12, double dk34);

// Roots s12 of ω̄_add,zeta = 0. If anomalies is given, it is incremented when
// the number of admissible cubic roots differs from one.
std::vector<BranchRoot> solve_s12_exp(double zeta, double dk12, double dk34, std::size_t* anomalies = nullptr);

// Roots s12 of ω̄ = 0 away from gamma1/gamma2 for any model.
std::vector<BranchRoot> solve_s12(const DispersionModel& model, double dk12, double dk34,
                                  std::size_t* anomalies = nullptr);

// (g^2 + eps^2)^-1/2 with g = (ω'(k1) + ω'(k2) - ω'(k3) - ω'(k4)) / 2.
double jacobian_weight(const DispersionModel& model, double k1, double k2, double k3, double k4, double epsilon);

Deposit deposit_nu(const DispersionModel& model, std::size_t n, double k_target);

// Samples in lexicographic order of (dk12, dk34, branch). The grid runs over
// dk = j/n, j = -n/2 .. n/2 - 1 in both coordinates.
std::vector<ManifoldSample> enumerate_samples(const DispersionModel& model, std::size_t n, double epsilon,
                                              ManifoldDiagnostics* diagnostics = nullptr, unsigned threads = 1);

std::vector<Gamma2Sample> gamma2_samples(const DispersionModel& model, std::size_t n, double epsilon);

// max over samples of |phi(k1) + phi(k2) - phi(k3) - phi(k4)|
double check_collision_invariant(const std::function<double(double)>& phi, const std::vector<ManifoldSample>& samples);

struct ManifoldRecord {
    double k1, k3, k4;
    Branch branch;
    std::optional<std::array<double, 3>> bloch;  // Bloch vector of A[W] + A[W]^*
};

// One record per enumerated sample; Bloch columns are filled when a state is given.
std::vector<ManifoldRecord> export_manifold(const DispersionModel& model, std::size_t n, double epsilon,
                                            const WignerState* state = nullptr);

// Contours in the (k3, k4) plane at fixed k1, as traced in the classic slice
// figures. Labels are "gamma1", "gamma2", "diag" and "ellip".
struct SlicePoint {
    double k3, k4;
    std::string contour;
};

std::vector<SlicePoint> manifold_slice(const DispersionModel& model, double k1, std::size_t resolution);

}  // namespace hubbard
