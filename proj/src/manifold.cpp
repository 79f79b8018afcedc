#include "hubbard/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hubbard/collision.hpp"
#include "hubbard/parallel.hpp"

namespace hubbard {

std::string to_string(Branch branch) {
    switch (branch) {
        case Branch::diag_plus: return "diag_plus";
        case Branch::diag_minus: return "diag_minus";
        case Branch::ellip_plus: return "ellip_plus";
        case Branch::ellip_minus: return "ellip_minus";
        case Branch::exp_plus: return "exp_plus";
        case Branch::exp_minus: return "exp_minus";
    }
    return "unknown";
}

bool is_ellip(Branch branch) noexcept { return branch == Branch::ellip_plus || branch == Branch::ellip_minus; }

namespace {

constexpr double kRootTolerance = 1e-12;

// s12 in [-1, 1) for the root c = cos(pi s12), sign selects the arccos branch.
double s12_from_cos(double c, bool plus) {
    c = std::clamp(c, -1.0, 1.0);
    double s = std::acos(c) / kPi;
    if (!plus) s = -s;
    if (s >= 1.0) s -= 2.0;
    return s;
}

void push_pair(std::vector<BranchRoot>& roots, double c, Branch plus, Branch minus) {
    roots.push_back({plus, s12_from_cos(c, true)});
    roots.push_back({minus, s12_from_cos(c, false)});
}

}  // namespace

std::vector<BranchRoot> solve_s12_nnn(double eta, double dk12, double dk34) {
    const double r = 4.0 * eta * (std::cos(kTwoPi * dk12) + std::cos(kTwoPi * dk34));
    const double root = std::sqrt(1.0 + 2.0 * r * r);
    std::vector<BranchRoot> roots;
    roots.reserve(4);
    // (sqrt(1 + 2r^2) - 1) / (2r), rewritten to stay accurate as r -> 0.
    const double c_diag = r / (root + 1.0);
    push_pair(roots, c_diag, Branch::diag_plus, Branch::diag_minus);
    if (r != 0.0) {
        const double c_ellip = (-root - 1.0) / (2.0 * r);
        if (std::abs(c_ellip) <= 1.0 + kRootTolerance) {
            push_pair(roots, c_ellip, Branch::ellip_plus, Branch::ellip_minus);
        }
    }
    return roots;
}

std::vector<double> exp_cubic_admissible_roots(double zeta, double dk12, double dk34) {
    const double c12 = std::cos(kTwoPi * dk12);
    const double c34 = std::cos(kTwoPi * dk34);
    const double ch = std::cosh(zeta);
    // c^3 + p c + q = 0
    const double p = -(1.0 + ch * ch + c12 * c34);
    const double q = ch * (c12 + c34);

    std::vector<double> real_roots;
    const double disc = 4.0 * p * p * p + 27.0 * q * q;
    const double scale = std::sqrt(-p / 3.0);
    if (disc < 0.0) {
        const double arg = std::clamp((3.0 * q / (2.0 * p)) / scale, -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            real_roots.push_back(2.0 * scale * std::cos(theta - kTwoPi * k / 3.0));
        }
    } else {
        const double arg = std::max(1.0, (-3.0 * std::abs(q) / (2.0 * p)) / scale);
        const double sign = q > 0.0 ? 1.0 : (q < 0.0 ? -1.0 : 0.0);
        real_roots.push_back(-2.0 * sign * scale * std::cosh(std::acosh(arg) / 3.0));
    }

    std::vector<double> admissible;
    for (double c : real_roots) {
        // One Newton step removes the rounding left by the trigonometric form.
        const double f = (c * c + p) * c + q;
        const double df = 3.0 * c * c + p;
        if (df != 0.0) c -= f / df;
        if (std::abs(c) <= 1.0 + kRootTolerance) admissible.push_back(std::clamp(c, -1.0, 1.0));
    }
    std::sort(admissible.begin(), admissible.end());
    return admissible;
}

std::vector<BranchRoot> solve_s12_exp(double zeta, double dk12, double dk34, std::size_t* anomalies) {
    if (!(zeta > 0.0)) throw std::invalid_argument("solve_s12_exp requires zeta > 0");
    const std::vector<double> cs = exp_cubic_admissible_roots(zeta, dk12, dk34);
    if (cs.size() != 1 && anomalies != nullptr) ++*anomalies;
    std::vector<BranchRoot> roots;
    roots.reserve(2 * cs.size());
    for (double c : cs) push_pair(roots, c, Branch::exp_plus, Branch::exp_minus);
    return roots;
}

std::vector<BranchRoot> solve_s12(const DispersionModel& model, double dk12, double dk34, std::size_t* anomalies) {
    switch (model.kind) {
        case DispersionKind::nearest: return solve_s12_nnn(0.0, dk12, dk34);
        case DispersionKind::nnn: return solve_s12_nnn(model.eta, dk12, dk34);
        case DispersionKind::exp: return solve_s12_exp(model.zeta, dk12, dk34, anomalies);
        case DispersionKind::mth: {
            // cos(pi m s12) = 0
            std::vector<BranchRoot> roots;
            const int m = model.m;
            for (int l = -m; l < m; ++l) {
                const double s = (2.0 * l + 1.0) / (2.0 * m);
                roots.push_back({s > 0.0 ? Branch::diag_plus : Branch::diag_minus, s});
            }
            return roots;
        }
    }
    return {};
}

double jacobian_weight(const DispersionModel& model, double k1, double k2, double k3, double k4, double epsilon) {
    const double g =
        0.5 * (omega_prime(model, k1) + omega_prime(model, k2) - omega_prime(model, k3) - omega_prime(model, k4));
    return 1.0 / std::sqrt(g * g + epsilon * epsilon);
}

Deposit deposit_nu(const DispersionModel& model, std::size_t n, double k_target) {
    const auto size = static_cast<std::ptrdiff_t>(n);
    const double k = reduce_momentum(k_target);
    const double x = k * static_cast<double>(n);
    const double base = std::floor(x);
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(base) % size;
    if (j < 0) j += size;
    const auto index = static_cast<std::size_t>(j);
    const double w_lo = omega(model, grid_momentum(index, n));
    const double w_hi = omega(model, grid_momentum((index + 1) % n, n));
    Deposit d;
    d.index = static_cast<std::uint32_t>(index);
    if (w_lo == w_hi) {
        d.nu = 1.0 - (x - base);
    } else {
        d.nu = (omega(model, k) - w_hi) / (w_lo - w_hi);
    }
    return d;
}

std::vector<ManifoldSample> enumerate_samples(const DispersionModel& model, std::size_t n, double epsilon,
                                              ManifoldDiagnostics* diagnostics, unsigned threads) {
    model.validate();
    validate_grid_size(n);
    if (!(epsilon > 0.0)) throw std::invalid_argument("mollification epsilon must be > 0");

    const double half_n = static_cast<double>(n / 2);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double cell = 0.5 * kPi * inv_n * inv_n;

    struct Row {
        std::vector<ManifoldSample> samples;
        ManifoldDiagnostics diag;
    };
    std::vector<Row> rows(n);

    for_each_chunk(n, threads, [&](std::size_t a) {
        Row& row = rows[a];
        const double dk12 = (static_cast<double>(a) - half_n) * inv_n;
        for (std::size_t b = 0; b < n; ++b) {
            const double dk34 = (static_cast<double>(b) - half_n) * inv_n;
            for (const BranchRoot& root : solve_s12(model, dk12, dk34, &row.diag.cubic_anomalies)) {
                ManifoldSample s;
                s.dk12 = dk12;
                s.dk34 = dk34;
                s.s12 = root.s12;
                s.branch = root.branch;
                const double half_s = 0.5 * root.s12;
                s.k = {reduce_momentum(half_s + dk12), reduce_momentum(half_s - dk12), reduce_momentum(half_s + dk34),
                       reduce_momentum(half_s - dk34)};
                s.weight = cell * jacobian_weight(model, s.k[0], s.k[1], s.k[2], s.k[3], epsilon);
                s.deposit = deposit_nu(model, n, s.k[0]);
                if (s.deposit.nu < 0.0 || s.deposit.nu > 1.0) ++row.diag.nu_out_of_range;
                const double residual = std::abs(omega_bar(model, s.k[0], s.k[1], s.k[2], s.k[3]));
                row.diag.max_omega_bar_residual = std::max(row.diag.max_omega_bar_residual, residual);
                row.samples.push_back(s);
            }
        }
    });

    std::vector<ManifoldSample> samples;
    ManifoldDiagnostics total;
    for (Row& row : rows) {
        samples.insert(samples.end(), row.samples.begin(), row.samples.end());
        total.nu_out_of_range += row.diag.nu_out_of_range;
        total.cubic_anomalies += row.diag.cubic_anomalies;
        total.max_omega_bar_residual = std::max(total.max_omega_bar_residual, row.diag.max_omega_bar_residual);
    }
    if (diagnostics != nullptr) *diagnostics = total;
    return samples;
}

std::vector<Gamma2Sample> gamma2_samples(const DispersionModel& model, std::size_t n, double epsilon) {
    model.validate();
    validate_grid_size(n);
    if (!(epsilon > 0.0)) throw std::invalid_argument("mollification epsilon must be > 0");
    std::vector<double> slope(n);
    for (std::size_t j = 0; j < n; ++j) slope[j] = omega_prime(model, grid_momentum(j, n));
    const double scale = kPi / static_cast<double>(n);
    std::vector<Gamma2Sample> out;
    out.reserve(n * n);
    for (std::size_t i1 = 0; i1 < n; ++i1) {
        for (std::size_t i2 = 0; i2 < n; ++i2) {
            const double g = slope[i1] - slope[i2];
            out.push_back({static_cast<std::uint32_t>(i1), static_cast<std::uint32_t>(i2),
                           scale / std::sqrt(g * g + epsilon * epsilon)});
        }
    }
    return out;
}

double check_collision_invariant(const std::function<double(double)>& phi, const std::vector<ManifoldSample>& samples) {
    double worst = 0.0;
    for (const ManifoldSample& s : samples) {
        const double r = phi(s.k[0]) + phi(s.k[1]) - phi(s.k[2]) - phi(s.k[3]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

std::vector<ManifoldRecord> export_manifold(const DispersionModel& model, std::size_t n, double epsilon,
                                            const WignerState* state) {
    const std::vector<ManifoldSample> samples = enumerate_samples(model, n, epsilon);
    std::optional<Interpolant> interp;
    if (state != nullptr) interp.emplace(*state);
    std::vector<ManifoldRecord> records;
    records.reserve(samples.size());
    for (const ManifoldSample& s : samples) {
        ManifoldRecord rec{s.k[0], s.k[2], s.k[3], s.branch, std::nullopt};
        if (interp) {
            const Herm2 a = a_full((*interp)(s.k[0]), (*interp)(s.k[1]), (*interp)(s.k[2]), (*interp)(s.k[3]));
            const Bloch b = bloch(a);
            rec.bloch = std::array<double, 3>{b.x, b.y, b.z};
        }
        records.push_back(rec);
    }
    return records;
}

namespace {

// Solves the ω̄_add factor for cos(2 pi dk34) at fixed s12 and dk12.
std::optional<double> slice_c34(const DispersionModel& model, double s12, double c12) {
    switch (model.kind) {
        case DispersionKind::nnn: {
            const double denom = 2.0 * model.eta * std::cos(kTwoPi * s12);
            if (denom == 0.0) return std::nullopt;
            return -std::cos(kPi * s12) / denom - c12;
        }
        case DispersionKind::exp: {
            const double c = std::cos(kPi * s12);
            const double ch = std::cosh(model.zeta);
            const double denom = c * c12 - ch;
            if (denom == 0.0) return std::nullopt;
            return (c * c * c - c * (1.0 + ch * ch) + ch * c12) / denom;
        }
        default: return std::nullopt;
    }
}

}  // namespace

std::vector<SlicePoint> manifold_slice(const DispersionModel& model, double k1, std::size_t resolution) {
    model.validate();
    std::vector<SlicePoint> points;
    const double step = 1.0 / static_cast<double>(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
        const double t = -0.5 + (static_cast<double>(i) + 0.5) * step;
        points.push_back({reduce_momentum(k1), t, "gamma1"});
        points.push_back({t, reduce_momentum(k1), "gamma2"});
    }

    if (!model.has_add_factor()) {
        // Straight diag lines k3 + k4 = s for every admissible s.
        for (const BranchRoot& root : solve_s12(model, 0.0, 0.0)) {
            if (root.branch == Branch::diag_minus && model.kind != DispersionKind::mth) continue;
            for (std::size_t i = 0; i < resolution; ++i) {
                const double k3 = -0.5 + (static_cast<double>(i) + 0.5) * step;
                points.push_back({k3, reduce_momentum(root.s12 - k3), "diag"});
            }
        }
        return points;
    }

    // Walk k2 over the zone; s12 = k1 + k2 fixed, then solve for dk34.
    for (std::size_t i = 0; i < resolution; ++i) {
        const double k2 = -0.5 + (static_cast<double>(i) + 0.5) * step;
        const double s12 = k1 + k2;
        const double dk12 = 0.5 * (k1 - k2);
        const double c12 = std::cos(kTwoPi * dk12);
        const std::optional<double> c34 = slice_c34(model, s12, c12);
        if (!c34 || std::abs(*c34) > 1.0) continue;
        const double base = std::acos(*c34) / kTwoPi;
        for (double dk34 : {base, -base}) {
            const double k3 = reduce_momentum(0.5 * s12 + dk34);
            const double k4 = reduce_momentum(0.5 * s12 - dk34);
            std::string label = "diag";
            if (model.kind == DispersionKind::nnn) {
                const double r = 4.0 * model.eta * (c12 + *c34);
                const double c = std::cos(kPi * s12);
                const double c_diag = r / (std::sqrt(1.0 + 2.0 * r * r) + 1.0);
                if (std::abs(c - c_diag) > 1e-8) label = "ellip";
            }
            points.push_back({k3, k4, label});
        }
    }
    return points;
}

}  // namespace hubbard
