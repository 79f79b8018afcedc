#include "hubbard/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace hubbard {

double grid_momentum(std::size_t j, std::size_t n) noexcept {
    const double k = static_cast<double>(j) / static_cast<double>(n);
    return 2 * j >= n ? k - 1.0 : k;
}

void validate_grid_size(std::size_t n) {
    if (n < 8 || n % 2 != 0) {
        throw std::invalid_argument("grid size must be even and >= 8, got " + std::to_string(n));
    }
}

WignerState sample_state(std::size_t n, const std::function<Herm2(double)>& w) {
    WignerState state(n);
    for (std::size_t j = 0; j < n; ++j) state[j] = w(grid_momentum(j, n));
    return state;
}

Herm2 initial_wigner(double k) {
    using std::cos;
    const double x = kTwoPi * k;
    const double sz = std::sinh(0.4);
    const double cz = std::cosh(0.4);
    const double thermal_exponent = 0.5 * sz / (cos(x) - cz);

    const double wave = 18.0 * cos(kPi * (6.0 * k + 1.0 / 7.0)) - 14.0 * cos(3.0 * x - 6.0 * kPi / 7.0);

    const double up_rational = 27.0 / (std::cosh(1.0) - cos(2.0 * x)) *
                               (std::exp(-0.6) * cos(x) + cos(2.0 * x) - std::exp(0.4) * cos(3.0 * x) - std::exp(-1.0));
    const double dn_rational = 27.0 / (std::cosh(1.5) - cos(2.0 * x)) *
                               (std::exp(-1.1) * cos(x) + cos(2.0 * x) - std::exp(0.4) * cos(3.0 * x) - std::exp(-1.5));

    Herm2 w;
    w.uu = 1.0 / (std::exp(thermal_exponent + 0.5) + 1.0) + (wave + up_rational) / 432.0;
    w.dd = 1.0 / (std::exp(thermal_exponent + 1.1) + 1.0) + (-wave + dn_rational) / 432.0;

    using cplx = std::complex<double>;
    const cplx i{0.0, 1.0};
    const cplx ud = (9.0 * std::sin(std::exp(4.0 * i * x)) - cplx{1.0, 1.0} * cos(3.0 * x - 6.0 * kPi / 7.0) +
                     6.0 * cplx{1.0, -1.0} * std::sin(kPi * (3.0 * k + 1.0 / 14.0)) *
                         std::sin(3.0 * kPi * (k - 1.0 / 7.0))) /
                    54.0;
    w.re = ud.real();
    w.im = ud.imag();
    return w;
}

WignerState initial_state(std::size_t n) {
    validate_grid_size(n);
    return sample_state(n, initial_wigner);
}

void check_fermi(const WignerState& state, double tol) {
    for (std::size_t j = 0; j < state.size(); ++j) {
        const Herm2& w = state[j];
        if (!w.is_finite()) {
            throw FermiViolation("non-finite Wigner matrix at grid index " + std::to_string(j), j, NAN);
        }
        const auto [lo, hi] = eig2(w);
        if (lo < -tol || hi > 1.0 + tol) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "Fermi property violated at grid index " << j << " (k = " << state.momentum(j)
                << "): eigenvalues " << lo << ", " << hi;
            throw FermiViolation(msg.str(), j, lo < -tol ? lo : hi);
        }
    }
}

Interpolant::Interpolant(const WignerState& state) : nodes_(state.size()) {
    const std::size_t n = state.size();
    for (std::size_t j = 0; j < n; ++j) {
        const Herm2& fm = state[(j + n - 1) % n];
        const Herm2& f0 = state[j];
        const Herm2& f1 = state[(j + 1) % n];
        const Herm2& f2 = state[(j + 2) % n];
        NodeCoefficients& c = nodes_[j];
        c.f = f0;
        c.d1 = f1 - f0;
        c.c2 = 0.5 * (f1 - 2.0 * f0 + fm);
        c.c3 = (1.0 / 6.0) * (f2 - 3.0 * f1 + 3.0 * f0 - fm);
    }
}

Herm2 Interpolant::operator()(double k) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(nodes_.size());
    const double x = reduce_momentum(k) * static_cast<double>(n);
    const double base = std::floor(x);
    const double t = x - base;
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(base) % n;
    if (j < 0) j += n;
    const NodeCoefficients& c = nodes_[static_cast<std::size_t>(j)];
    // Newton form over the node order j, j+1, j-1, j+2.
    const double b1 = t;
    const double b2 = t * (t - 1.0);
    const double b3 = b2 * (t + 1.0);
    Herm2 r = c.f;
    r.add_scaled(b1, c.d1);
    r.add_scaled(b2, c.c2);
    r.add_scaled(b3, c.c3);
    return r;
}

Herm2 interpolate(const WignerState& state, double k) { return Interpolant(state)(k); }

Herm2 conserved_spin(const WignerState& state) {
    Herm2 sum;
    for (const Herm2& w : state.values) sum += w;
    return (1.0 / static_cast<double>(state.size())) * sum;
}

double conserved_energy(const WignerState& state, const DispersionModel& model) {
    return trace_moment(state, [&model](double k) { return omega(model, k); });
}

double trace_moment(const WignerState& state, const std::function<double(double)>& g) {
    double sum = 0.0;
    for (std::size_t j = 0; j < state.size(); ++j) sum += g(state.momentum(j)) * state[j].trace();
    return sum / static_cast<double>(state.size());
}

std::size_t reflected_index(std::size_t j, std::size_t n) noexcept { return (n / 2 + n - j) % n; }

std::vector<double> odd_trace_profile(const WignerState& state) {
    const std::size_t n = state.size();
    if (n % 4 != 0) {
        throw std::invalid_argument("odd trace profile needs a grid size divisible by 4");
    }
    std::vector<double> profile(n);
    for (std::size_t j = 0; j < n; ++j) {
        profile[j] = state[j].trace() - state[reflected_index(j, n)].trace();
    }
    return profile;
}

namespace {

double binary_entropy(double e) {
    e = std::clamp(e, 0.0, 1.0);
    double s = 0.0;
    if (e > 0.0) s -= e * std::log(e);
    if (e < 1.0) s -= (1.0 - e) * std::log1p(-e);
    return s;
}

}  // namespace

double entropy(const WignerState& state) {
    check_fermi(state);
    double sum = 0.0;
    for (const Herm2& w : state.values) {
        const auto [lo, hi] = eig2(w);
        sum += binary_entropy(lo) + binary_entropy(hi);
    }
    return sum / static_cast<double>(state.size());
}

double hs_distance(const WignerState& a, const WignerState& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hs_distance: grid sizes differ");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sum += hs_norm2(a[j] - b[j]);
    return std::sqrt(sum / static_cast<double>(a.size()));
}

double max_hs_norm(std::span<const Herm2> values) {
    double m = 0.0;
    for (const Herm2& v : values) m = std::max(m, std::sqrt(hs_norm2(v)));
    return m;
}

}  // namespace hubbard
