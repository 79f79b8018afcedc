#include <doctest.h>

#include <cmath>
#include <random>

#include "hubbard/wigner.hpp"
#include "oracle.hpp"

using namespace hubbard;

namespace {

WignerState constant_state(std::size_t n, const Herm2& w) { return sample_state(n, [w](double) { return w; }); }

// Values frozen from the n = 4096 quadrature of oracle::appendix_a.
const Herm2 kSpinRef{0.49214979202359138, 0.35879550487548639, 0.0, 0.0};
const double kEnergyRef[] = {0.69966456492337992, 0.69897737938547355, 0.63094601113243465, -1.0316142275183036};

}  // namespace

TEST_CASE("grid convention") {
    CHECK(grid_momentum(0, 8) == 0.0);
    CHECK(grid_momentum(4, 8) == -0.5);
    CHECK(grid_momentum(7, 8) == -0.125);
    CHECK_THROWS_AS(validate_grid_size(6), std::invalid_argument);
    CHECK_THROWS_AS(validate_grid_size(9), std::invalid_argument);
    CHECK_NOTHROW(validate_grid_size(8));
}

TEST_CASE("initial state matches the transcribed formula") {
    const WignerState s = initial_state(128);
    double err = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) err = std::max(err, oracle::distance(oracle::appendix_a(s.momentum(j)), s[j]));
    CHECK(err <= 1e-14);
    CHECK(s[0].re == doctest::Approx(0.132825).epsilon(1e-5));
    CHECK(s[0].im == doctest::Approx(0.040789).epsilon(1e-5));
}

TEST_CASE("initial state obeys the Fermi property and is continuous") {
    CHECK_NOTHROW(check_fermi(initial_state(128), 0.0));
    double previous = 0.0;
    for (std::size_t n : {64, 128, 256, 512}) {
        const WignerState s = initial_state(n);
        double jump = 0.0;
        for (std::size_t j = 0; j < n; ++j) jump = std::max(jump, std::sqrt(hs_norm2(s[(j + 1) % n] - s[j])));
        if (previous > 0.0) CHECK(jump < 0.6 * previous);
        previous = jump;
    }
}

TEST_CASE("check_fermi rejects eigenvalues outside [0, 1]") {
    WignerState s = constant_state(8, Herm2::scalar(0.5));
    s[3] = Herm2{1.0 + 1e-6, 0.5, 0.0, 0.0};
    try {
        check_fermi(s);
        FAIL("expected a violation");
    } catch (const FermiViolation& e) {
        CHECK(e.index() == 3);
        CHECK(e.eigenvalue() == doctest::Approx(1.0 + 1e-6));
    }
    s[3] = Herm2{1.0 + 1e-10, 0.5, 0.0, 0.0};
    CHECK_NOTHROW(check_fermi(s));
}

TEST_CASE("interpolation reproduces nodes and cubics") {
    std::mt19937_64 rng(31);
    const WignerState s = oracle::random_state(rng, 32);
    const Interpolant f(s);
    for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(f(s.momentum(j)) == s[j]);
        CHECK(f(s.momentum(j) + 1.0) == s[j]);
    }
    // A cubic in k sampled on the grid: exact on intervals whose stencil does not wrap.
    const std::size_t n = 16;
    auto cubic = [](double k) { return Herm2{1 + k - 2 * k * k + 3 * k * k * k, k * k * k, 0.5 - k, 2 * k * k}; };
    const Interpolant g(sample_state(n, cubic));
    double err = 0.0;
    for (double k = -0.3; k < 0.3; k += 0.0137) {
        const Herm2 d = g(k) - cubic(k);
        err = std::max({err, std::abs(d.uu), std::abs(d.dd), std::abs(d.re), std::abs(d.im)});
    }
    CHECK(err <= 1e-13);
}

TEST_CASE("interpolation converges at fourth order") {
    std::vector<double> errors;
    for (std::size_t n : {32, 64, 128, 256}) {
        const Interpolant f(sample_state(n, [](double k) { return Herm2{std::sin(kTwoPi * k), 0.0, 0.0, 0.0}; }));
        double err = 0.0;
        for (int i = 0; i < 4000; ++i) {
            const double k = -0.5 + (i + 0.37) / 4000.0;
            err = std::max(err, std::abs(f(k).uu - std::sin(kTwoPi * k)));
        }
        errors.push_back(err);
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double ratio = errors[i - 1] / errors[i];
        CHECK(ratio > 13.0);
        CHECK(ratio < 19.0);
    }
}

TEST_CASE("conserved spin") {
    CHECK(conserved_spin(constant_state(16, Herm2::scalar(0.5))) == Herm2::scalar(0.5));
    const Herm2 half_x = 0.5 * Herm2::sigma_x();
    CHECK(conserved_spin(constant_state(16, half_x)) == half_x);
    const Herm2 n = conserved_spin(initial_state(128));
    CHECK(std::sqrt(hs_norm2(n - kSpinRef)) <= 1e-10);

    oracle::Mat sum;
    const std::size_t big = 4096;
    for (std::size_t j = 0; j < big; ++j) sum = sum + oracle::appendix_a(grid_momentum(j, big));
    CHECK(oracle::distance(oracle::cplx(1.0 / big) * sum, kSpinRef) <= 1e-15);
}

TEST_CASE("conserved energy") {
    const WignerState half = constant_state(64, Herm2::scalar(0.5));
    for (double eta : {0.0, 0.3, -0.2}) CHECK(conserved_energy(half, DispersionModel::nnn(eta)) == doctest::Approx(1.0));
    for (int m : {1, 2, 3}) CHECK(std::abs(conserved_energy(half, DispersionModel::mth(m))) <= 1e-15);

    const DispersionModel models[] = {DispersionModel::nearest(), DispersionModel::nnn(0.005), DispersionModel::nnn(0.5),
                                      DispersionModel::exp(0.4)};
    const WignerState s = initial_state(128);
    const std::size_t big = 4096;
    for (int q = 0; q < 4; ++q) {
        CHECK(std::abs(conserved_energy(s, models[q]) - kEnergyRef[q]) <= 1e-10);
        double oracle_sum = 0.0;
        for (std::size_t j = 0; j < big; ++j) {
            const double k = grid_momentum(j, big);
            oracle_sum += omega(models[q], k) * oracle::trace(oracle::appendix_a(k)).real();
        }
        CHECK(std::abs(oracle_sum / big - kEnergyRef[q]) <= 1e-14);
    }
}

TEST_CASE("odd trace profile") {
    for (double d : odd_trace_profile(constant_state(16, Herm2{0.3, 0.6, 0.1, 0.0}))) CHECK(d == 0.0);
    const WignerState cosine = sample_state(32, [](double k) { return Herm2{std::cos(kTwoPi * k), 0.0, 0.0, 0.0}; });
    const auto d = odd_trace_profile(cosine);
    for (std::size_t j = 0; j < 32; ++j) CHECK(d[j] == doctest::Approx(2 * std::cos(kTwoPi * cosine.momentum(j))));
    CHECK_THROWS_AS(odd_trace_profile(WignerState(10)), std::invalid_argument);

    const auto profile = odd_trace_profile(initial_state(128));
    const std::pair<std::size_t, double> reference[] = {
        {0, 0.69779832114525364},  {1, 0.69536072791967718},    {5, 0.62797840412389738},
        {17, 0.36915648703702475}, {40, -0.21922979572635404},  {100, 0.11337613807431723}};
    for (const auto& [j, v] : reference) {
        CHECK(profile[j] == doctest::Approx(v).epsilon(1e-14));
        const double k = grid_momentum(j, 128);
        const double direct = (oracle::trace(oracle::appendix_a(k)) - oracle::trace(oracle::appendix_a(0.5 - k))).real();
        CHECK(direct == doctest::Approx(v).epsilon(1e-14));
    }
    for (std::size_t j = 0; j < 128; ++j) CHECK(profile[reflected_index(j, 128)] == -profile[j]);
}

TEST_CASE("entropy") {
    CHECK(entropy(constant_state(16, Herm2::scalar(0.5))) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
    CHECK(entropy(constant_state(16, Herm2::zero())) == 0.0);
    CHECK(entropy(constant_state(16, Herm2::identity())) == 0.0);
    std::mt19937_64 rng(32);
    const WignerState s = oracle::random_state(rng, 64);
    WignerState hole(64);
    for (std::size_t j = 0; j < 64; ++j) hole[j] = complement(s[j]);
    CHECK(entropy(hole) == doctest::Approx(entropy(s)).epsilon(1e-13));
    CHECK(entropy(initial_state(128)) == doctest::Approx(1.0798558251792949).epsilon(1e-12));
}

TEST_CASE("Hilbert-Schmidt distance") {
    std::mt19937_64 rng(33);
    const WignerState a = oracle::random_state(rng, 32);
    CHECK(hs_distance(a, a) == 0.0);
    WignerState b = a;
    for (auto& w : b.values) w -= Herm2::sigma_x();
    CHECK(hs_distance(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(hs_distance(a, WignerState(16)), std::invalid_argument);
    CHECK(max_hs_norm(std::vector<Herm2>{Herm2::sigma_z(), Herm2::scalar(0.1)}) == doctest::Approx(std::sqrt(2.0)));
}
