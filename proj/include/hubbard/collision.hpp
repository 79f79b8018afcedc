#pragma once

#include <cstddef>
#include <vector>

#include "hubbard/dispersion.hpp"
#include "hubbard/herm2.hpp"
#include "hubbard/manifold.hpp"
#include "hubbard/wigner.hpp"

namespace hubbard {

struct CollisionDiagnostics {
    std::size_t nu_out_of_range = 0;
    std::size_t clamp_events = 0;  // interpolated W pulled back into [0, 1]
    double max_omega_bar_residual = 0.0;
    double heff_antihermitian = 0.0;  // largest anti-Hermitian part of H_eff before symmetrization
};

struct CollisionOutput {
    std::vector<Herm2> derivative;  // dW/dt at every grid node
    CollisionDiagnostics diagnostics;
};

// Quartic part of A[W] + A[W]*:
//   -W~1 W3 W~2 W4 - W4 W~2 W3 W~1 + W1 W~3 W2 W~4 + W~4 W2 W~3 W1
Herm2 a_quad(const Herm2& w1, const Herm2& w2, const Herm2& w3, const Herm2& w4) noexcept;

// Trace part of A[W] + A[W]*:
//   {W~1, W3} tr[W~2 W4] - {W1, W~3} tr[W2 W~4]
Herm2 a_tr(const Herm2& w1, const Herm2& w2, const Herm2& w3, const Herm2& w4) noexcept;

inline Herm2 a_full(const Herm2& w1, const Herm2& w2, const Herm2& w3, const Herm2& w4) noexcept {
    return a_quad(w1, w2, w3, w4) + a_tr(w1, w2, w3, w4);
}

// Projects the eigenvalues of a into [0, 1]; *clamped is set when anything moved.
Herm2 clamp_fermi(const Herm2& a, bool* clamped = nullptr) noexcept;

// Effective Hamiltonian at grid node j, summed over the grid with the
// mollified principal value ω̄ / (ω̄^2 + eps^2). If antihermitian is given it
// receives the HS norm of the anti-Hermitian part removed by symmetrization.
Herm2 heff(const WignerState& state, const DispersionModel& model, double epsilon, std::size_t j,
           double* antihermitian = nullptr);

// State-independent quadrature data shared by all evaluations of one run.
class CollisionEngine {
public:
    CollisionEngine(const DispersionModel& model, std::size_t n, double epsilon, unsigned threads = 1);

    const DispersionModel& model() const noexcept { return model_; }
    std::size_t size() const noexcept { return n_; }
    double epsilon() const noexcept { return epsilon_; }
    unsigned threads() const noexcept { return threads_; }
    void set_threads(unsigned threads) noexcept { threads_ = threads == 0 ? 1 : threads; }

    const std::vector<ManifoldSample>& samples() const noexcept { return samples_; }
    const std::vector<Gamma2Sample>& gamma2() const noexcept { return gamma2_; }
    const ManifoldDiagnostics& manifold_diagnostics() const noexcept { return manifold_diag_; }

    // C_d over the manifold samples plus the exchange contour.
    CollisionOutput dissipative(const WignerState& state) const;
    // C_c = -i[H_eff, W].
    CollisionOutput conservative(const WignerState& state) const;
    // C_c + C_d
    CollisionOutput collision(const WignerState& state) const;
    // Scalar collision operator for diagonal states; rejects off-diagonal input.
    CollisionOutput dissipative_diag(const WignerState& state) const;

    // H_eff at every grid node.
    std::vector<Herm2> heff_all(const WignerState& state, double* antihermitian = nullptr) const;

private:
    void require_size(const WignerState& state) const;

    DispersionModel model_;
    std::size_t n_;
    double epsilon_;
    unsigned threads_;
    std::vector<ManifoldSample> samples_;
    std::vector<Gamma2Sample> gamma2_;
    ManifoldDiagnostics manifold_diag_;
    std::vector<double> grid_omega_;
};

// Largest HS norm of the off-diagonal part over the grid.
double max_offdiagonal(const WignerState& state) noexcept;

}  // namespace hubbard
