#pragma once

#include <numbers>
#include <string>

namespace hubbard {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class DispersionKind { nearest, nnn, exp, mth };

std::string to_string(DispersionKind kind);
DispersionKind dispersion_kind_from_string(const std::string& name);

// Single-particle dispersion of the Hubbard chain.
//
//   nearest  1 - cos(2 pi k)
//   nnn      1 - cos(2 pi k) - eta cos(4 pi k)
//   exp      -(1/2) (1 + sinh(zeta) / (cosh(zeta) - cos(2 pi k)))
//   mth      -cos(2 pi m k)
struct DispersionModel {
    DispersionKind kind = DispersionKind::nearest;
    double eta = 0.0;
    double zeta = 1.0;
    int m = 1;

    static DispersionModel nearest() { return {}; }
    static DispersionModel nnn(double eta);
    static DispersionModel exp(double zeta);
    static DispersionModel mth(int m);

    // Throws std::invalid_argument if the parameters are out of range.
    void validate() const;

    // nearest, nnn and exp; mth models have no ω̄_add factor.
    bool has_add_factor() const noexcept { return kind == DispersionKind::nnn || kind == DispersionKind::exp; }

    std::string describe() const;

    friend bool operator==(const DispersionModel&, const DispersionModel&) = default;
};

// Reduces k to the representative in [-1/2, 1/2).
double reduce_momentum(double k) noexcept;

double omega(const DispersionModel& model, double k) noexcept;
double omega_prime(const DispersionModel& model, double k) noexcept;

// ω(k1) + ω(k2) - ω(k3) - ω(k4)
double omega_bar(const DispersionModel& model, double k1, double k2, double k3, double k4) noexcept;

// 4 sin(pi (k1 - k3)) sin(pi (k1 - k4)), the model-independent factor of ω̄.
double omega_bar_bas(double k1, double k3, double k4) noexcept;
// Same factor in difference coordinates: 2 (cos(2 pi dk34) - cos(2 pi dk12)).
double omega_bar_bas_delta(double dk12, double dk34) noexcept;

// Second factor of the energy mismatch in sum/difference coordinates
// (s12 = k1 + k2, dk12 = (k1 - k2)/2, dk34 = (k3 - k4)/2).
//
//   nnn:  cos(pi s12) + 2 eta cos(2 pi s12) (cos(2 pi dk12) + cos(2 pi dk34))
//   exp:  -c^3 + c (1 + cosh^2 zeta + cos(2 pi dk12) cos(2 pi dk34))
//         - cosh zeta (cos(2 pi dk12) + cos(2 pi dk34)),   c = cos(pi s12)
//
// so that ω̄_nnn = ω̄_bas * add and
// ω̄_exp = sinh(zeta)/2 * ω̄_bas * add / prod_i (cosh zeta - cos(2 pi k_i)).
// Throws std::invalid_argument for nearest and mth models.
double omega_bar_add(const DispersionModel& model, double s12, double dk12, double dk34);

// d/ds12 of omega_bar_add at fixed dk12, dk34.
double omega_bar_add_ds(const DispersionModel& model, double s12, double dk12, double dk34);

}  // namespace hubbard
