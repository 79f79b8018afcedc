#include "hubbard/dispersion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hubbard {

std::string to_string(DispersionKind kind) {
    switch (kind) {
        case DispersionKind::nearest: return "nearest";
        case DispersionKind::nnn: return "nnn";
        case DispersionKind::exp: return "exp";
        case DispersionKind::mth: return "mth";
    }
    return "unknown";
}

DispersionKind dispersion_kind_from_string(const std::string& name) {
    if (name == "nearest") return DispersionKind::nearest;
    if (name == "nnn") return DispersionKind::nnn;
    if (name == "exp") return DispersionKind::exp;
    if (name == "mth") return DispersionKind::mth;
    throw std::invalid_argument("unknown dispersion kind '" + name + "'");
}

DispersionModel DispersionModel::nnn(double eta) {
    DispersionModel model;
    model.kind = DispersionKind::nnn;
    model.eta = eta;
    model.validate();
    return model;
}

DispersionModel DispersionModel::exp(double zeta) {
    DispersionModel model;
    model.kind = DispersionKind::exp;
    model.zeta = zeta;
    model.validate();
    return model;
}

DispersionModel DispersionModel::mth(int m) {
    DispersionModel model;
    model.kind = DispersionKind::mth;
    model.m = m;
    model.validate();
    return model;
}

void DispersionModel::validate() const {
    switch (kind) {
        case DispersionKind::nearest: break;
        case DispersionKind::nnn:
            if (!std::isfinite(eta)) throw std::invalid_argument("nnn model requires a finite eta");
            break;
        case DispersionKind::exp:
            if (!(zeta > 0.0) || !std::isfinite(zeta)) {
                throw std::invalid_argument("exp model requires zeta > 0");
            }
            break;
        case DispersionKind::mth:
            if (m < 1) throw std::invalid_argument("mth model requires m >= 1");
            break;
    }
}

std::string DispersionModel::describe() const {
    std::ostringstream out;
    out << to_string(kind);
    switch (kind) {
        case DispersionKind::nnn: out << "(eta=" << eta << ")"; break;
        case DispersionKind::exp: out << "(zeta=" << zeta << ")"; break;
        case DispersionKind::mth: out << "(m=" << m << ")"; break;
        case DispersionKind::nearest: break;
    }
    return out.str();
}

double reduce_momentum(double k) noexcept {
    double r = k - std::floor(k + 0.5);
    if (r >= 0.5) r -= 1.0;
    return r;
}

double omega(const DispersionModel& model, double k) noexcept {
    switch (model.kind) {
        case DispersionKind::nearest: return 1.0 - std::cos(kTwoPi * k);
        case DispersionKind::nnn: return 1.0 - std::cos(kTwoPi * k) - model.eta * std::cos(2.0 * kTwoPi * k);
        case DispersionKind::exp:
            return -0.5 * (1.0 + std::sinh(model.zeta) / (std::cosh(model.zeta) - std::cos(kTwoPi * k)));
        case DispersionKind::mth: return -std::cos(kTwoPi * model.m * k);
    }
    return 0.0;
}

double omega_prime(const DispersionModel& model, double k) noexcept {
    switch (model.kind) {
        case DispersionKind::nearest: return kTwoPi * std::sin(kTwoPi * k);
        case DispersionKind::nnn:
            return kTwoPi * std::sin(kTwoPi * k) + 2.0 * kTwoPi * model.eta * std::sin(2.0 * kTwoPi * k);
        case DispersionKind::exp: {
            const double denom = std::cosh(model.zeta) - std::cos(kTwoPi * k);
            return kPi * std::sinh(model.zeta) * std::sin(kTwoPi * k) / (denom * denom);
        }
        case DispersionKind::mth: return kTwoPi * model.m * std::sin(kTwoPi * model.m * k);
    }
    return 0.0;
}

double omega_bar(const DispersionModel& model, double k1, double k2, double k3, double k4) noexcept {
    return omega(model, k1) + omega(model, k2) - omega(model, k3) - omega(model, k4);
}

double omega_bar_bas(double k1, double k3, double k4) noexcept {
    return 4.0 * std::sin(kPi * (k1 - k3)) * std::sin(kPi * (k1 - k4));
}

double omega_bar_bas_delta(double dk12, double dk34) noexcept {
    return 2.0 * (std::cos(kTwoPi * dk34) - std::cos(kTwoPi * dk12));
}

double omega_bar_add(const DispersionModel& model, double s12, double dk12, double dk34) {
    const double c12 = std::cos(kTwoPi * dk12);
    const double c34 = std::cos(kTwoPi * dk34);
    switch (model.kind) {
        case DispersionKind::nnn:
            return std::cos(kPi * s12) + 2.0 * model.eta * std::cos(kTwoPi * s12) * (c12 + c34);
        case DispersionKind::exp: {
            const double c = std::cos(kPi * s12);
            const double ch = std::cosh(model.zeta);
            return -c * c * c + c * (1.0 + ch * ch + c12 * c34) - ch * (c12 + c34);
        }
        default: break;
    }
    throw std::invalid_argument("omega_bar_add is defined for nnn and exp models only");
}

double omega_bar_add_ds(const DispersionModel& model, double s12, double dk12, double dk34) {
    const double c12 = std::cos(kTwoPi * dk12);
    const double c34 = std::cos(kTwoPi * dk34);
    switch (model.kind) {
        case DispersionKind::nnn:
            return -kPi * std::sin(kPi * s12) - 2.0 * kTwoPi * model.eta * std::sin(kTwoPi * s12) * (c12 + c34);
        case DispersionKind::exp: {
            const double c = std::cos(kPi * s12);
            const double dc = -kPi * std::sin(kPi * s12);
            const double ch = std::cosh(model.zeta);
            return (-3.0 * c * c + 1.0 + ch * ch + c12 * c34) * dc;
        }
        default: break;
    }
    throw std::invalid_argument("omega_bar_add_ds is defined for nnn and exp models only");
}

}  // namespace hubbard
