#pragma once

// Complex Hermitian 2x2 matrices stored as four reals.
//
//     [ uu              re + i*im ]
//     [ re - i*im       dd        ]
//
// All kernels below are closed-form expressions in these components and
// return Hermitian results by construction. Internally they go through the
// Pauli decomposition a = a0*I + ax*sx + ay*sy + az*sz, which keeps every
// expression branch-free.

#include <array>
#include <cmath>
#include <utility>

namespace hubbard {

struct Herm2 {
    double uu = 0.0;  // up-up diagonal entry
    double dd = 0.0;  // down-down diagonal entry
    double re = 0.0;  // real part of the up-down entry
    double im = 0.0;  // imaginary part of the up-down entry

    static constexpr Herm2 zero() noexcept { return {}; }
    static constexpr Herm2 identity() noexcept { return {1.0, 1.0, 0.0, 0.0}; }
    static constexpr Herm2 scalar(double c) noexcept { return {c, c, 0.0, 0.0}; }
    static constexpr Herm2 sigma_x() noexcept { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Herm2 sigma_y() noexcept { return {0.0, 0.0, 0.0, -1.0}; }
    static constexpr Herm2 sigma_z() noexcept { return {1.0, -1.0, 0.0, 0.0}; }

    constexpr double trace() const noexcept { return uu + dd; }

    bool is_finite() const noexcept {
        return std::isfinite(uu) && std::isfinite(dd) && std::isfinite(re) && std::isfinite(im);
    }

    constexpr Herm2& operator+=(const Herm2& o) noexcept {
        uu += o.uu;
        dd += o.dd;
        re += o.re;
        im += o.im;
        return *this;
    }
    constexpr Herm2& operator-=(const Herm2& o) noexcept {
        uu -= o.uu;
        dd -= o.dd;
        re -= o.re;
        im -= o.im;
        return *this;
    }
    constexpr Herm2& operator*=(double c) noexcept {
        uu *= c;
        dd *= c;
        re *= c;
        im *= c;
        return *this;
    }

    // this += c * o
    constexpr void add_scaled(double c, const Herm2& o) noexcept {
        uu += c * o.uu;
        dd += c * o.dd;
        re += c * o.re;
        im += c * o.im;
    }

    friend constexpr bool operator==(const Herm2&, const Herm2&) = default;
};

constexpr Herm2 operator+(Herm2 a, const Herm2& b) noexcept { return a += b; }
constexpr Herm2 operator-(Herm2 a, const Herm2& b) noexcept { return a -= b; }
constexpr Herm2 operator*(double c, Herm2 a) noexcept { return a *= c; }
constexpr Herm2 operator*(Herm2 a, double c) noexcept { return a *= c; }
constexpr Herm2 operator-(const Herm2& a) noexcept { return {-a.uu, -a.dd, -a.re, -a.im}; }

// 1 - a
constexpr Herm2 complement(const Herm2& a) noexcept { return {1.0 - a.uu, 1.0 - a.dd, -a.re, -a.im}; }

namespace detail {

struct Vec3 {
    double x, y, z;
};

constexpr Vec3 operator+(const Vec3& a, const Vec3& b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(const Vec3& a, const Vec3& b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double c, const Vec3& a) noexcept { return {c * a.x, c * a.y, c * a.z}; }
constexpr double dot(const Vec3& a, const Vec3& b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// a = s*I + v.sigma
struct Pauli {
    double s;
    Vec3 v;
};

constexpr Pauli to_pauli(const Herm2& a) noexcept {
    return {0.5 * (a.uu + a.dd), {a.re, -a.im, 0.5 * (a.uu - a.dd)}};
}

constexpr Herm2 from_pauli(double s, const Vec3& v) noexcept { return {s + v.z, s - v.z, v.x, -v.y}; }

// Product of two Hermitian matrices: p*I + (u + i*w).sigma with real p, u, w.
struct Product {
    double p;
    Vec3 u;
    Vec3 w;
};

constexpr Product multiply(const Pauli& a, const Pauli& b) noexcept {
    return {a.s * b.s + dot(a.v, b.v), a.s * b.v + b.s * a.v, cross(a.v, b.v)};
}

}  // namespace detail

// i(ab - ba)
constexpr Herm2 comm_i(const Herm2& a, const Herm2& b) noexcept {
    using namespace detail;
    const Pauli pa = to_pauli(a);
    const Pauli pb = to_pauli(b);
    return from_pauli(0.0, -2.0 * cross(pa.v, pb.v));
}

// ab + ba
constexpr Herm2 anticomm(const Herm2& a, const Herm2& b) noexcept {
    using namespace detail;
    const Pauli pa = to_pauli(a);
    const Pauli pb = to_pauli(b);
    return from_pauli(2.0 * (pa.s * pb.s + dot(pa.v, pb.v)), 2.0 * (pa.s * pb.v + pb.s * pa.v));
}

// abc + cba
constexpr Herm2 triple_sym(const Herm2& a, const Herm2& b, const Herm2& c) noexcept {
    using namespace detail;
    const Product ab = multiply(to_pauli(a), to_pauli(b));
    const Pauli pc = to_pauli(c);
    const double s = ab.p * pc.s + dot(ab.u, pc.v);
    const Vec3 v = ab.p * pc.v + pc.s * ab.u - cross(ab.w, pc.v);
    return from_pauli(2.0 * s, 2.0 * v);
}

// abcd + dcba
constexpr Herm2 quad_sym(const Herm2& a, const Herm2& b, const Herm2& c, const Herm2& d) noexcept {
    using namespace detail;
    const Product ab = multiply(to_pauli(a), to_pauli(b));
    const Product cd = multiply(to_pauli(c), to_pauli(d));
    const double s = ab.p * cd.p + dot(ab.u, cd.u) - dot(ab.w, cd.w);
    const Vec3 v = ab.p * cd.u + cd.p * ab.u - (cross(ab.u, cd.w) + cross(ab.w, cd.u));
    return from_pauli(2.0 * s, 2.0 * v);
}

// tr(ab)
constexpr double trace_prod(const Herm2& a, const Herm2& b) noexcept {
    return a.uu * b.uu + a.dd * b.dd + 2.0 * (a.re * b.re + a.im * b.im);
}

// Squared Hilbert-Schmidt norm, sum of |entries|^2.
constexpr double hs_norm2(const Herm2& a) noexcept {
    return a.uu * a.uu + a.dd * a.dd + 2.0 * (a.re * a.re + a.im * a.im);
}

// Eigenvalues in ascending order; a degenerate matrix returns the same value twice.
inline std::pair<double, double> eig2(const Herm2& a) noexcept {
    const double mean = 0.5 * (a.uu + a.dd);
    const double half_diff = 0.5 * (a.uu - a.dd);
    const double radius = std::sqrt(half_diff * half_diff + a.re * a.re + a.im * a.im);
    return {mean - radius, mean + radius};
}

// Bloch components (x, y, z, t) with a = (t*I + x*sx + y*sy + z*sz) / 2.
struct Bloch {
    double x, y, z, t;
};

constexpr Bloch bloch(const Herm2& a) noexcept { return {2.0 * a.re, -2.0 * a.im, a.uu - a.dd, a.uu + a.dd}; }

constexpr Herm2 from_bloch(const Bloch& b) noexcept {
    return {0.5 * (b.t + b.z), 0.5 * (b.t - b.z), 0.5 * b.x, -0.5 * b.y};
}

// Applies f to the eigenvalues: V diag(f(l0), f(l1)) V^dagger.
template <typename F>
Herm2 spectral_map(const Herm2& a, F&& f) {
    using namespace detail;
    const Pauli p = to_pauli(a);
    const double radius = std::sqrt(dot(p.v, p.v));
    const double lo = p.s - radius;
    const double hi = p.s + radius;
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    // a = lo*P_lo + hi*P_hi with P_{hi/lo} = (I +/- n.sigma)/2, n = v/|v|.
    if (radius == 0.0) {
        return Herm2::scalar(f_lo);
    }
    const double s = 0.5 * (f_hi + f_lo);
    const double c = 0.5 * (f_hi - f_lo) / radius;
    return from_pauli(s, c * p.v);
}

}  // namespace hubbard
