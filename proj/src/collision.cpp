#include "hubbard/collision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hubbard/parallel.hpp"

namespace hubbard {

namespace {

constexpr std::size_t kChunks = 64;
constexpr double kDiagonalTolerance = 1e-12;

using detail::Product;
using detail::Vec3;

Product& operator+=(Product& a, const Product& b) noexcept {
    a.p += b.p;
    a.u = a.u + b.u;
    a.w = a.w + b.w;
    return a;
}

Product scaled(double c, const Product& a) noexcept { return {c * a.p, c * a.u, c * a.w}; }

// Product ab minus tr(b) a, both Hermitian.
Product m_term(const Herm2& a, const Herm2& b) noexcept {
    using namespace detail;
    const Pauli pa = to_pauli(a);
    Product r = multiply(pa, to_pauli(b));
    const double tb = b.trace();
    r.p -= tb * pa.s;
    r.u = r.u - tb * pa.v;
    return r;
}

// -{a, b} + tr(a) b + a, Hermitian.
Product n_term(const Herm2& a, const Herm2& b) noexcept {
    using namespace detail;
    const Herm2 h = -anticomm(a, b) + a.trace() * b + a;
    const Pauli ph = to_pauli(h);
    return {ph.s, ph.v, {0.0, 0.0, 0.0}};
}

Herm2 hermitian_part(const Product& h, double* antihermitian) noexcept {
    using namespace detail;
    if (antihermitian != nullptr) *antihermitian = std::sqrt(2.0 * dot(h.w, h.w));
    return from_pauli(h.p, h.u);
}

double mollified_pv(double x, double epsilon) noexcept { return x / (x * x + epsilon * epsilon); }

struct Accumulator {
    std::vector<Herm2> values;
    std::size_t clamp_events = 0;
};

void merge(std::vector<Accumulator>& parts, CollisionOutput& out) {
    for (Accumulator& part : parts) {
        for (std::size_t j = 0; j < out.derivative.size(); ++j) out.derivative[j] += part.values[j];
        out.diagnostics.clamp_events += part.clamp_events;
    }
}

}  // namespace

Herm2 a_quad(const Herm2& w1, const Herm2& w2, const Herm2& w3, const Herm2& w4) noexcept {
    const Herm2 t1 = complement(w1);
    const Herm2 t2 = complement(w2);
    const Herm2 t3 = complement(w3);
    const Herm2 t4 = complement(w4);
    return quad_sym(w1, t3, w2, t4) - quad_sym(t1, w3, t2, w4);
}

Herm2 a_tr(const Herm2& w1, const Herm2& w2, const Herm2& w3, const Herm2& w4) noexcept {
    const Herm2 t1 = complement(w1);
    const Herm2 t2 = complement(w2);
    const Herm2 t3 = complement(w3);
    const Herm2 t4 = complement(w4);
    Herm2 r = trace_prod(t2, w4) * anticomm(t1, w3);
    r.add_scaled(-trace_prod(w2, t4), anticomm(w1, t3));
    return r;
}

Herm2 clamp_fermi(const Herm2& a, bool* clamped) noexcept {
    using namespace detail;
    const Pauli p = to_pauli(a);
    const double radius = std::sqrt(dot(p.v, p.v));
    const double lo = p.s - radius;
    const double hi = p.s + radius;
    if (lo >= 0.0 && hi <= 1.0) {
        if (clamped != nullptr) *clamped = false;
        return a;
    }
    if (clamped != nullptr) *clamped = true;
    const double lo_c = std::clamp(lo, 0.0, 1.0);
    const double hi_c = std::clamp(hi, 0.0, 1.0);
    const double s = 0.5 * (hi_c + lo_c);
    if (radius == 0.0) return Herm2::scalar(s);
    return from_pauli(s, (0.5 * (hi_c - lo_c) / radius) * p.v);
}

Herm2 heff(const WignerState& state, const DispersionModel& model, double epsilon, std::size_t j,
           double* antihermitian) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("heff: epsilon must be > 0");
    const std::size_t n = state.size();
    if (j >= n) throw std::out_of_range("heff: grid index out of range");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = omega(model, state.momentum(i));

    Product sum{};
    for (std::size_t j2 = 0; j2 < n; ++j2) {
        for (std::size_t j3 = 0; j3 < n; ++j3) {
            const std::size_t j4 = (j + j2 + n - j3) % n;
            const double weight = mollified_pv(w[j] + w[j2] - w[j3] - w[j4], epsilon);
            Product term = m_term(state[j3], state[j4]);
            term += n_term(state[j2], state[j3]);
            sum += scaled(weight, term);
        }
    }
    const double scale = 1.0 / static_cast<double>(n * n);
    return hermitian_part(scaled(scale, sum), antihermitian);
}

CollisionEngine::CollisionEngine(const DispersionModel& model, std::size_t n, double epsilon, unsigned threads)
    : model_(model), n_(n), epsilon_(epsilon), threads_(threads == 0 ? 1 : threads) {
    samples_ = enumerate_samples(model_, n_, epsilon_, &manifold_diag_, threads_);
    gamma2_ = gamma2_samples(model_, n_, epsilon_);
    grid_omega_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) grid_omega_[j] = omega(model_, grid_momentum(j, n_));
}

void CollisionEngine::require_size(const WignerState& state) const {
    if (state.size() != n_) {
        throw std::invalid_argument("state has " + std::to_string(state.size()) + " grid points, engine expects " +
                                    std::to_string(n_));
    }
}

CollisionOutput CollisionEngine::dissipative(const WignerState& state) const {
    require_size(state);
    check_fermi(state);
    const Interpolant interp(state);
    const double dn = static_cast<double>(n_);

    std::vector<Accumulator> parts(kChunks);
    for_each_chunk(kChunks, threads_, [&](std::size_t c) {
        Accumulator& acc = parts[c];
        acc.values.assign(n_, Herm2{});
        const auto [begin, end] = chunk_range(samples_.size(), kChunks, c);
        for (std::size_t i = begin; i < end; ++i) {
            const ManifoldSample& s = samples_[i];
            Herm2 w[4];
            for (int q = 0; q < 4; ++q) {
                bool clamped = false;
                w[q] = clamp_fermi(interp(s.k[q]), &clamped);
                acc.clamp_events += clamped ? 1 : 0;
            }
            const Herm2 a = a_full(w[0], w[1], w[2], w[3]);
            const double scale = dn * s.weight;
            const std::size_t j = s.deposit.index;
            acc.values[j].add_scaled(scale * s.deposit.nu, a);
            acc.values[(j + 1) % n_].add_scaled(scale * (1.0 - s.deposit.nu), a);
        }
        // The exchange contour sits on grid nodes: no interpolation, no split.
        const auto [g_begin, g_end] = chunk_range(gamma2_.size(), kChunks, c);
        for (std::size_t i = g_begin; i < g_end; ++i) {
            const Gamma2Sample& g = gamma2_[i];
            const Herm2& w1 = state[g.i1];
            const Herm2& w2 = state[g.i2];
            acc.values[g.i1].add_scaled(g.weight, a_tr(w1, w2, w2, w1));
        }
    });

    CollisionOutput out;
    out.derivative.assign(n_, Herm2{});
    merge(parts, out);
    out.diagnostics.nu_out_of_range = manifold_diag_.nu_out_of_range;
    out.diagnostics.max_omega_bar_residual = manifold_diag_.max_omega_bar_residual;
    return out;
}

std::vector<Herm2> CollisionEngine::heff_all(const WignerState& state, double* antihermitian) const {
    require_size(state);
    const std::size_t n = n_;
    // M34 = W3 W4 - tr(W4) W3 and N23 = -{W2, W3} + tr(W2) W3 + W2 depend on two indices only.
    std::vector<Product> m(n * n);
    std::vector<Product> nn(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            m[a * n + b] = m_term(state[a], state[b]);
            nn[a * n + b] = n_term(state[a], state[b]);
        }
    }

    std::vector<Herm2> h(n);
    std::vector<double> residual(n, 0.0);
    const double scale = 1.0 / static_cast<double>(n * n);
    for_each_chunk(n, threads_, [&](std::size_t j1) {
        const double w1 = grid_omega_[j1];
        Product sum{};
        for (std::size_t j3 = 0; j3 < n; ++j3) {
            const double w13 = w1 - grid_omega_[j3];
            for (std::size_t j4 = 0; j4 < n; ++j4) {
                const std::size_t j2 = (j3 + j4 + n - j1) % n;
                const double weight = mollified_pv(w13 + grid_omega_[j2] - grid_omega_[j4], epsilon_);
                const Product& mt = m[j3 * n + j4];
                const Product& nt = nn[j2 * n + j3];
                sum.p += weight * (mt.p + nt.p);
                sum.u = sum.u + weight * (mt.u + nt.u);
                sum.w = sum.w + weight * mt.w;
            }
        }
        h[j1] = hermitian_part(scaled(scale, sum), &residual[j1]);
    });
    if (antihermitian != nullptr) *antihermitian = *std::max_element(residual.begin(), residual.end());
    return h;
}

CollisionOutput CollisionEngine::conservative(const WignerState& state) const {
    CollisionOutput out;
    const std::vector<Herm2> h = heff_all(state, &out.diagnostics.heff_antihermitian);
    out.derivative.resize(n_);
    // comm_i(W, H) = i(WH - HW) = -i[H, W]
    for (std::size_t j = 0; j < n_; ++j) out.derivative[j] = comm_i(state[j], h[j]);
    return out;
}

CollisionOutput CollisionEngine::collision(const WignerState& state) const {
    CollisionOutput out = dissipative(state);
    const CollisionOutput cc = conservative(state);
    for (std::size_t j = 0; j < n_; ++j) out.derivative[j] += cc.derivative[j];
    out.diagnostics.heff_antihermitian = cc.diagnostics.heff_antihermitian;
    return out;
}

CollisionOutput CollisionEngine::dissipative_diag(const WignerState& state) const {
    require_size(state);
    if (max_offdiagonal(state) > kDiagonalTolerance) {
        throw std::invalid_argument("dissipative_diag requires a diagonal state");
    }
    check_fermi(state);

    WignerState diag(n_, state.time);
    for (std::size_t j = 0; j < n_; ++j) diag[j] = {state[j].uu, state[j].dd, 0.0, 0.0};
    const Interpolant interp(diag);
    const double dn = static_cast<double>(n_);

    std::vector<Accumulator> parts(kChunks);
    for_each_chunk(kChunks, threads_, [&](std::size_t c) {
        Accumulator& acc = parts[c];
        acc.values.assign(n_, Herm2{});
        const auto [begin, end] = chunk_range(samples_.size(), kChunks, c);
        for (std::size_t i = begin; i < end; ++i) {
            const ManifoldSample& s = samples_[i];
            double u[4];
            double d[4];
            for (int q = 0; q < 4; ++q) {
                const Herm2 w = interp(s.k[q]);
                u[q] = std::clamp(w.uu, 0.0, 1.0);
                d[q] = std::clamp(w.dd, 0.0, 1.0);
                acc.clamp_events += (u[q] != w.uu || d[q] != w.dd) ? 1 : 0;
            }
            const double up = 2.0 * ((1 - u[0]) * (1 - d[1]) * u[2] * d[3] - u[0] * d[1] * (1 - u[2]) * (1 - d[3]));
            const double dn_rate =
                2.0 * ((1 - d[0]) * (1 - u[1]) * d[2] * u[3] - d[0] * u[1] * (1 - d[2]) * (1 - u[3]));
            const Herm2 a{up, dn_rate, 0.0, 0.0};
            const double scale = dn * s.weight;
            const std::size_t j = s.deposit.index;
            acc.values[j].add_scaled(scale * s.deposit.nu, a);
            acc.values[(j + 1) % n_].add_scaled(scale * (1.0 - s.deposit.nu), a);
        }
        const auto [g_begin, g_end] = chunk_range(gamma2_.size(), kChunks, c);
        for (std::size_t i = g_begin; i < g_end; ++i) {
            const Gamma2Sample& g = gamma2_[i];
            const Herm2& w1 = diag[g.i1];
            const Herm2& w2 = diag[g.i2];
            const Herm2 a = a_tr(w1, w2, w2, w1);
            acc.values[g.i1].add_scaled(g.weight, Herm2{a.uu, a.dd, 0.0, 0.0});
        }
    });

    CollisionOutput out;
    out.derivative.assign(n_, Herm2{});
    merge(parts, out);
    out.diagnostics.nu_out_of_range = manifold_diag_.nu_out_of_range;
    out.diagnostics.max_omega_bar_residual = manifold_diag_.max_omega_bar_residual;
    return out;
}

double max_offdiagonal(const WignerState& state) noexcept {
    double m = 0.0;
    for (const Herm2& w : state.values) m = std::max(m, std::hypot(w.re, w.im));
    return m;
}

}  // namespace hubbard
