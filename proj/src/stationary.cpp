#include "hubbard/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hubbard {

namespace {

using cplx = std::complex<double>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

constexpr double kDegenerateRadius = 1e-14;
constexpr double kFitTolerance = 1e-12;
constexpr int kMaxIterations = 200;

Mat2 to_matrix(const Herm2& w) {
    return {{{cplx{w.uu, 0.0}, cplx{w.re, w.im}}, {cplx{w.re, -w.im}, cplx{w.dd, 0.0}}}};
}

Herm2 from_matrix(const Mat2& m) { return {m[0][0].real(), m[1][1].real(), m[0][1].real(), m[0][1].imag()}; }

// Multiplies a unit spinor by a phase so its first nonzero component is real
// positive; components below kNegligible count as zero.
Spinor fix_phase(Spinor v) {
    constexpr double kNegligible = 1e-12;
    const int lead = std::abs(v[0]) > kNegligible ? 0 : 1;
    const cplx phase = std::conj(v[lead]) / std::abs(v[lead]);
    v[0] *= phase;
    v[1] *= phase;
    v[lead] = cplx{v[lead].real(), 0.0};
    return v;
}

Spinor normalized(Spinor v) {
    const double norm = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    v[0] /= norm;
    v[1] /= norm;
    return v;
}

// Solves the 3x3 system a x = b by Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (a[col][col] == 0.0) throw FitError("thermal_fit: singular Jacobian");
        for (int r = col + 1; r < 3; ++r) {
            const double factor = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

std::vector<double> grid_omega(const DispersionModel& model, std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = omega(model, grid_momentum(j, n));
    return w;
}

void check_density(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw FitError(std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
}

}  // namespace

Herm2 SpinBasis::to_basis(const Herm2& w) const noexcept {
    const Mat2 m = to_matrix(w);
    Mat2 r{};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            cplx s{};
            for (int p = 0; p < 2; ++p) {
                for (int q = 0; q < 2; ++q) s += std::conj(vectors[a][p]) * m[p][q] * vectors[b][q];
            }
            r[a][b] = s;
        }
    }
    return from_matrix(r);
}

Herm2 SpinBasis::from_basis(const Herm2& w) const noexcept {
    const Mat2 m = to_matrix(w);
    Mat2 r{};
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            cplx s{};
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) s += vectors[a][p] * m[a][b] * std::conj(vectors[b][q]);
            }
            r[p][q] = s;
        }
    }
    return from_matrix(r);
}

double SpinBasis::orthonormality_error() const noexcept {
    double worst = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const cplx dot = std::conj(vectors[a][0]) * vectors[b][0] + std::conj(vectors[a][1]) * vectors[b][1];
            worst = std::max(worst, std::abs(dot - cplx{a == b ? 1.0 : 0.0, 0.0}));
        }
    }
    return worst;
}

SpinEigen spin_eigenbasis(const Herm2& spin) {
    const auto [lo, hi] = eig2(spin);
    if (lo < -kFermiTolerance || hi > 1.0 + kFermiTolerance) {
        throw std::invalid_argument("spin_eigenbasis: eigenvalues outside [0, 1]");
    }
    SpinEigen out;
    out.n_up = hi;
    out.n_dn = lo;
    if (hi - lo <= 2.0 * kDegenerateRadius) {
        out.degenerate = true;
        return out;
    }
    const cplx b{spin.re, spin.im};
    // Two candidate eigenvectors for hi; the longer one is numerically safer.
    Spinor v1{b, cplx{hi - spin.uu, 0.0}};
    Spinor v2{cplx{hi - spin.dd, 0.0}, std::conj(b)};
    const double n1 = std::norm(v1[0]) + std::norm(v1[1]);
    const double n2 = std::norm(v2[0]) + std::norm(v2[1]);
    const Spinor up = fix_phase(normalized(n1 >= n2 ? v1 : v2));
    const Spinor dn = fix_phase(Spinor{-std::conj(up[1]), std::conj(up[0])});
    out.basis.vectors = {up, dn};
    return out;
}

WignerState project_diagonal(const WignerState& state, const SpinBasis& basis) {
    WignerState out(state.size(), state.time);
    for (std::size_t j = 0; j < state.size(); ++j) {
        const Herm2 local = basis.to_basis(state[j]);
        out[j] = basis.from_basis({local.uu, local.dd, 0.0, 0.0});
    }
    return out;
}

ThermalParams thermal_fit(const DispersionModel& model, double n_up, double n_dn, double energy, std::size_t n) {
    model.validate();
    validate_grid_size(n);
    check_density(n_up, "n_up");
    check_density(n_dn, "n_dn");
    const std::vector<double> w = grid_omega(model, n);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double mean_omega = std::accumulate(w.begin(), w.end(), 0.0) * inv_n;

    ThermalParams out;
    if (std::abs(n_up - 0.5) <= kFitTolerance && std::abs(n_dn - 0.5) <= kFitTolerance &&
        std::abs(energy - mean_omega) <= kFitTolerance) {
        out.infinite_temperature = true;
        return out;
    }

    const std::array<double, 2> target{n_up, n_dn};
    // Unknowns x = (beta, a_up, a_dn) with a_s = beta mu_s; the map stays regular at beta = 0.
    auto residual = [&](const std::array<double, 3>& x) {
        std::array<double, 3> r{-n_up, -n_dn, -energy};
        for (std::size_t j = 0; j < n; ++j) {
            for (int s = 0; s < 2; ++s) {
                const double f = fermi_dirac(x[0] * w[j] - x[1 + s]);
                r[s] += f * inv_n;
                r[2] += w[j] * f * inv_n;
            }
        }
        return r;
    };
    auto norm = [](const std::array<double, 3>& r) { return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])}); };

    std::vector<double> sorted = w;
    std::sort(sorted.begin(), sorted.end());
    std::array<double, 3> x{1.0, 0.0, 0.0};
    for (int s = 0; s < 2; ++s) {
        const auto filled = static_cast<std::size_t>(std::clamp(target[s] * static_cast<double>(n), 1.0,
                                                                static_cast<double>(n - 1)));
        x[1 + s] = 0.5 * (sorted[filled - 1] + sorted[filled]);
    }

    std::array<double, 3> r = residual(x);
    int it = 0;
    for (; it < kMaxIterations && norm(r) > kFitTolerance; ++it) {
        std::array<std::array<double, 3>, 3> jac{};
        for (std::size_t j = 0; j < n; ++j) {
            for (int s = 0; s < 2; ++s) {
                const double f = fermi_dirac(x[0] * w[j] - x[1 + s]);
                const double q = f * (1.0 - f) * inv_n;
                jac[s][0] -= q * w[j];
                jac[s][1 + s] += q;
                jac[2][0] -= q * w[j] * w[j];
                jac[2][1 + s] += q * w[j];
            }
        }
        const std::array<double, 3> step = solve3(jac, {-r[0], -r[1], -r[2]});
        double lambda = 1.0;
        std::array<double, 3> trial{};
        std::array<double, 3> rt{};
        for (;;) {
            for (int i = 0; i < 3; ++i) trial[i] = x[i] + lambda * step[i];
            rt = residual(trial);
            if (norm(rt) < (1.0 - 1e-4 * lambda) * norm(r) || lambda < 1e-10) break;
            lambda *= 0.5;
        }
        x = trial;
        r = rt;
        if (!std::isfinite(x[0]) || std::abs(x[0]) > 1e4) {
            throw FitError("thermal_fit: |beta| exceeded 1e4; the energy is outside the admissible range");
        }
    }
    if (norm(r) > kFitTolerance) {
        throw FitError("thermal_fit: no convergence after " + std::to_string(it) + " iterations (residual " +
                       std::to_string(norm(r)) + ")");
    }
    out.beta = x[0];
    out.mu_up = x[1] / x[0];
    out.mu_dn = x[2] / x[0];
    out.iterations = it;
    out.residual = norm(r);
    return out;
}

ThermalParams thermal_fit(const WignerState& state, const DispersionModel& model) {
    const SpinEigen eig = spin_eigenbasis(conserved_spin(state));
    ThermalParams p = thermal_fit(model, eig.n_up, eig.n_dn, conserved_energy(state, model), state.size());
    p.basis = eig.basis;
    return p;
}

WignerState thermal_state(const ThermalParams& params, const DispersionModel& model, std::size_t n) {
    validate_grid_size(n);
    WignerState out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = omega(model, grid_momentum(j, n));
        const double up = params.infinite_temperature ? 0.5 : fermi_dirac(params.beta * (w - params.mu_up));
        const double dn = params.infinite_temperature ? 0.5 : fermi_dirac(params.beta * (w - params.mu_dn));
        out[j] = params.basis.from_basis({up, dn, 0.0, 0.0});
    }
    return out;
}

namespace {

// h(f) = sum_s FD(f - a_s) - FD(-f - a_s), strictly decreasing from 2 to -2.
double odd_trace(double f, double a_up, double a_dn) {
    return fermi_dirac(f - a_up) - fermi_dirac(-f - a_up) + fermi_dirac(f - a_dn) - fermi_dirac(-f - a_dn);
}

double solve_pair(double d, double a_up, double a_dn) {
    double lo = -1.0;
    double hi = 1.0;
    while (odd_trace(lo, a_up, a_dn) < d) lo *= 2.0;
    while (odd_trace(hi, a_up, a_dn) > d) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (odd_trace(mid, a_up, a_dn) > d) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double fd_slope(double x) {
    const double f = fermi_dirac(x);
    return f * (1.0 - f);
}

}  // namespace

NonThermalParams nonthermal_fit(const std::vector<double>& d, double n_up, double n_dn) {
    const std::size_t n = d.size();
    validate_grid_size(n);
    if (n % 4 != 0) throw std::invalid_argument("nonthermal_fit needs a grid size divisible by 4");
    check_density(n_up, "n_up");
    check_density(n_dn, "n_dn");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(std::abs(d[j]) < 2.0)) throw FitError("nonthermal_fit: inadmissible odd-trace profile (|d| >= 2)");
        const std::size_t r = reflected_index(j, n);
        if (std::abs(d[j] + d[r]) > 1e-12) throw FitError("nonthermal_fit: profile is not odd under k -> 1/2 - k");
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    const std::array<double, 2> target{n_up, n_dn};
    std::array<double, 2> a{std::log(n_up / (1.0 - n_up)), std::log(n_dn / (1.0 - n_dn))};
    std::vector<double> f(n, 0.0);

    auto solve_profile = [&](const std::array<double, 2>& av) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t r = reflected_index(j, n);
            if (r == j) f[j] = 0.0;
            else if (j < r) {
                f[j] = solve_pair(d[j], av[0], av[1]);
                f[r] = -f[j];
            }
        }
    };
    auto density_residual = [&](const std::array<double, 2>& av) {
        std::array<double, 2> res{-target[0], -target[1]};
        for (std::size_t j = 0; j < n; ++j) {
            for (int s = 0; s < 2; ++s) res[s] += fermi_dirac(f[j] - av[s]) * inv_n;
        }
        return res;
    };
    auto norm = [](const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };

    solve_profile(a);
    std::array<double, 2> res = density_residual(a);
    int it = 0;
    for (; it < kMaxIterations && norm(res) > kFitTolerance; ++it) {
        // dG_s/da_t = (1/n) sum_j FD'(f_j - a_s) (df_j/da_t - delta_st), df/da from h(f; a) = d.
        std::array<std::array<double, 2>, 2> jac{};
        for (std::size_t j = 0; j < n; ++j) {
            // h decreases in f: dh/df = -(sum of the four slopes).
            const double slopes = fd_slope(f[j] - a[0]) + fd_slope(-f[j] - a[0]) + fd_slope(f[j] - a[1]) +
                                 fd_slope(-f[j] - a[1]);
            std::array<double, 2> df_da{};
            for (int t = 0; t < 2; ++t) {
                const double dh_da = fd_slope(f[j] - a[t]) - fd_slope(-f[j] - a[t]);
                df_da[t] = dh_da / slopes;
            }
            for (int s = 0; s < 2; ++s) {
                const double slope = -fd_slope(f[j] - a[s]) * inv_n;
                for (int t = 0; t < 2; ++t) jac[s][t] += slope * (df_da[t] - (s == t ? 1.0 : 0.0));
            }
        }
        const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if (det == 0.0) throw FitError("nonthermal_fit: singular Jacobian");
        const std::array<double, 2> step{(-res[0] * jac[1][1] + res[1] * jac[0][1]) / det,
                                         (-res[1] * jac[0][0] + res[0] * jac[1][0]) / det};
        double lambda = 1.0;
        const std::array<double, 2> a_old = a;
        const double base = norm(res);
        for (;;) {
            a = {a_old[0] + lambda * step[0], a_old[1] + lambda * step[1]};
            solve_profile(a);
            res = density_residual(a);
            if (norm(res) < (1.0 - 1e-4 * lambda) * base || lambda < 1e-10) break;
            lambda *= 0.5;
        }
    }
    if (norm(res) > kFitTolerance) {
        throw FitError("nonthermal_fit: no convergence after " + std::to_string(it) + " iterations");
    }
    NonThermalParams out;
    out.f = std::move(f);
    out.a_up = a[0];
    out.a_dn = a[1];
    out.iterations = it;
    out.residual = norm(res);
    return out;
}

NonThermalParams nonthermal_fit(const WignerState& initial) {
    const SpinEigen eig = spin_eigenbasis(conserved_spin(initial));
    NonThermalParams p = nonthermal_fit(odd_trace_profile(initial), eig.n_up, eig.n_dn);
    p.basis = eig.basis;
    return p;
}

WignerState nonthermal_state(const NonThermalParams& params) {
    const std::size_t n = params.f.size();
    WignerState out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = params.basis.from_basis(
            {fermi_dirac(params.f[j] - params.a_up), fermi_dirac(params.f[j] - params.a_dn), 0.0, 0.0});
    }
    return out;
}

}  // namespace hubbard
