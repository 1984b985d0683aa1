#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "vfmc/gamma.hpp"
#include "vfmc/quadrature.hpp"
#include "vfmc/stats.hpp"

using namespace vfmc;

TEST_CASE("truncated mass Z(eta): closed forms and monotonicity") {
    MultifractalMeasure b4({{0.5, 1.0, 2.0, 4.0}});
    REQUIRE(b4.total_mass(0.1) == Catch::Approx(333.0).epsilon(1e-12));

    MultifractalMeasure b0({{0.5, 1.0, 2.0, 0.0}});
    REQUIRE(b0.total_mass(0.5) == Catch::Approx(0.5).epsilon(1e-12));

    double prev = 1e300;
    for (double eta : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const double z = b4.total_mass(eta);
        REQUIRE(z < prev);
        prev = z;
    }

    // logarithmic branch at b = 1
    MultifractalMeasure b1({{0.5, 1.0, 2.0, 1.0}});
    REQUIRE(b1.total_mass(0.1) == Catch::Approx(std::log(10.0)).epsilon(1e-12));

    REQUIRE_THROWS_AS(b4.total_mass(1.5), ConfigError);
    REQUIRE_THROWS_AS(b4.total_mass(0.0), ConfigError);
}

TEST_CASE("measure validation rejects bad atoms") {
    REQUIRE_THROWS_AS(MultifractalMeasure({}), ConfigError);
    REQUIRE_THROWS_AS(MultifractalMeasure({{0.5, 0.4, 2.0, 4.0}}), ConfigError);  // weight sum
    REQUIRE_THROWS_AS(MultifractalMeasure({{0.5, 1.0, 2.5, 4.0}}), ConfigError);  // a > 2
    REQUIRE_THROWS_AS(MultifractalMeasure({{-0.1, 1.0, 2.0, 4.0}}), ConfigError);
    REQUIRE_THROWS_AS(MultifractalMeasure({{0.5, 1.0, 2.0, 4.0}}, 1.5), ConfigError);
}

TEST_CASE("sampling: exact power relations and the Xi constraint") {
    const auto k41 = MultifractalMeasure::k41();
    RngStream rng(31, StreamKind::generic, 0, 0);
    for (int i = 0; i < 2000; ++i) {
        const SampledParams sp = k41.sample(0.05, rng);
        REQUIRE(sp.thickness > 0.05);
        REQUIRE(sp.thickness <= 1.0);
        REQUIRE(sp.length == std::pow(sp.thickness, 2.0));
        REQUIRE(sp.intensity == std::pow(sp.thickness, 1.0 / 3.0));
        REQUIRE(sp.thickness <= std::sqrt(sp.length) * (1 + 1e-12));
        REQUIRE(sp.importance_weight == 1.0);
    }
    const auto thin = MultifractalMeasure::k41_thin();
    for (int i = 0; i < 500; ++i) {
        const SampledParams sp = thin.sample(0.05, rng);
        REQUIRE(sp.length == 1.0);  // a = 0: unit-length filaments
        REQUIRE(sp.thickness <= 1.0);
    }
}

TEST_CASE("sampling: b = 0 gives uniform ell, b = 4 matches the analytic mean") {
    RngStream rng(77, StreamKind::generic, 1, 0);
    MultifractalMeasure uniform({{0.5, 1.0, 2.0, 0.0}});
    const double eta = 0.1;
    const int n = 10000;
    std::vector<double> draws;
    for (int i = 0; i < n; ++i) draws.push_back(uniform.sample(eta, rng).thickness);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = (draws[i] - eta) / (1.0 - eta);
        ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    REQUIRE(ks <= 0.02);

    MultifractalMeasure steep({{0.5, 1.0, 2.0, 4.0}});
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += steep.sample(eta, rng).thickness;
    // E[ell] = int l^-3 / int l^-4 over [0.1, 1] = 49.5 / 333
    REQUIRE(sum / n == Catch::Approx(49.5 / 333.0).epsilon(0.01));
}

TEST_CASE("analytic lower moment: K41 value, limits, additivity, quadrature") {
    const auto k41 = MultifractalMeasure::k41();
    const double val = k41.moment_lower(2, 0.1);
    REQUIRE(val == Catch::Approx(1.5 * std::pow(0.1, 2.0 / 3.0)).epsilon(1e-12));

    // quadrature oracle with the substitution ell = u^3 (removes the
    // integrable singularity of ell^(-1/3) at zero)
    const double by_quad =
        integrate([](double u) { return 3.0 * u; }, 0.0, std::cbrt(0.1), 1e-13);
    REQUIRE(val == Catch::Approx(by_quad).epsilon(1e-9));

    REQUIRE(k41.moment_lower(2, 1e-9) < 1e-5);

    MultifractalMeasure two({{1.0 / 3.0, 0.5, 2.0, 4.0}, {0.6, 0.5, 2.0, 4.0}});
    MultifractalMeasure a1({{1.0 / 3.0, 1.0, 2.0, 4.0}});
    MultifractalMeasure a2({{0.6, 1.0, 2.0, 4.0}});
    REQUIRE(two.moment_lower(2, 0.1) ==
            Catch::Approx(0.5 * a1.moment_lower(2, 0.1) + 0.5 * a2.moment_lower(2, 0.1))
                .epsilon(1e-12));

    REQUIRE_THROWS_AS(k41.moment_lower(2, 1.5), ConfigError);
    REQUIRE_THROWS_AS(k41.moment_lower(3, 0.1), ConfigError);
}

TEST_CASE("analytic upper moment: closed form, cap saturation, ordering") {
    const auto k41 = MultifractalMeasure::k41();

    // tail piece eps^2 int_eps^1 l^(-7/3) dl in closed form and by quadrature
    const double eps = 0.1;
    const double tail_quad =
        integrate([](double l) { return std::pow(l, -7.0 / 3.0); }, eps, 1.0, 1e-12);
    const double expected = k41.moment_lower(2, eps) + eps * eps * tail_quad;
    REQUIRE(k41.moment_upper(2, eps) == Catch::Approx(expected).epsilon(1e-9));

    // eps >= l_max: the cap is inactive and the value is gamma[U^p l T]
    REQUIRE(k41.moment_upper(2, 1.0) == Catch::Approx(k41.moment_lower(2, 1.0)).epsilon(1e-12));
    REQUIRE(k41.moment_upper(2, 7.0) == Catch::Approx(k41.moment_lower(2, 1.0)).epsilon(1e-12));

    for (double e : {0.01, 0.05, 0.2, 0.5, 1.0}) {
        REQUIRE(k41.moment_upper(2, e) >= k41.moment_lower(2, e));
        REQUIRE(k41.moment_upper(4, e) >= k41.moment_lower(4, e));
    }

    // logarithmic tail branch: (h-1)p + 2 + a - b = 0 for h=1/2, p=2, a=1, b=2
    MultifractalMeasure logcase({{0.5, 1.0, 1.0, 2.0}});
    const double e0 = 0.2;
    const double expected_log = e0 * e0 / 2.0 + e0 * e0 * std::log(1.0 / e0);
    REQUIRE(logcase.moment_upper(2, e0) == Catch::Approx(expected_log).epsilon(1e-12));
}

TEST_CASE("divergent moments are rejected loudly, naming the atom") {
    MultifractalMeasure bad({{1.0 / 3.0, 0.5, 2.0, 4.0}, {0.1, 0.5, 0.0, 6.0}});
    try {
        bad.moment_lower(2, 0.1);
        FAIL("expected DivergentMomentError");
    } catch (const DivergentMomentError& e) {
        REQUIRE(std::string(e.what()).find("atom 1") != std::string::npos);
    }
}

TEST_CASE("theoretical zeta: K41 in both geometries, affine in p") {
    const auto k41 = MultifractalMeasure::k41();
    const auto thin = MultifractalMeasure::k41_thin();
    for (int p : {2, 4, 6}) {
        REQUIRE(k41.zeta(p) == Catch::Approx(p / 3.0).epsilon(1e-14));
        REQUIRE(thin.zeta(p) == Catch::Approx(p / 3.0).epsilon(1e-14));
    }
    MultifractalMeasure single({{0.41, 1.0, 1.3, 2.2}});
    const double slope = (single.zeta(6) - single.zeta(4)) / 2.0;
    REQUIRE(slope == Catch::Approx(0.41).epsilon(1e-12));
}

TEST_CASE("zeta switches active atom at the predicted crossover") {
    // exponents: atom0 = 0.2 p + 1, atom1 = 0.5 p; equal at p* = 10/3
    MultifractalMeasure two({{0.2, 0.5, 2.0, 3.0}, {0.5, 0.5, 2.0, 4.0}});
    REQUIRE(two.active_atom(2) == 1);
    REQUIRE(two.zeta(2) == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(two.active_atom(4) == 0);
    REQUIRE(two.zeta(4) == Catch::Approx(1.8).epsilon(1e-14));
    REQUIRE(two.active_atom(6) == 0);
    REQUIRE(two.zeta(6) == Catch::Approx(2.2).epsilon(1e-14));
}

TEST_CASE("slope of the analytic moments recovers zeta as eps -> 0") {
    const auto k41 = MultifractalMeasure::k41();
    std::vector<FitPoint> lower, upper;
    for (int i = 0; i < 9; ++i) {
        const double eps = 1e-4 * std::pow(100.0, i / 8.0);
        lower.push_back({eps, k41.moment_lower(2, eps), 0.0});
        upper.push_back({eps, k41.moment_upper(2, eps), 0.0});
    }
    REQUIRE(fit_zeta(lower, 1e-4, 1e-2).zeta_hat == Catch::Approx(2.0 / 3.0).margin(1e-3));
    REQUIRE(fit_zeta(upper, 1e-4, 1e-2).zeta_hat == Catch::Approx(2.0 / 3.0).margin(1e-3));
}

TEST_CASE("Monte-Carlo consistency of the truncated moment") {
    // Z(eta) * E[U^p ell T 1_{ell<eps}] under sample() must match the
    // closed-form integral restricted to (eta, eps)
    const auto k41 = MultifractalMeasure::k41();
    const double eta = 0.05, eps = 0.3;
    const int p = 2;
    const double z = k41.total_mass(eta);
    const int n = 40000;
    BatchAccumulator acc(16);
    RngStream rng(123, StreamKind::generic, 2, 0);
    for (int i = 0; i < n; ++i) {
        const SampledParams sp = k41.sample(eta, rng);
        const double val = sp.thickness < eps
                               ? std::pow(sp.intensity, p) * sp.thickness * sp.length
                               : 0.0;
        acc.add(BatchAccumulator::batch_of(i, n, 16), z * val);
    }
    const double expected = integrate(
        [&](double l) { return std::pow(l, p / 3.0 + 1.0 + 2.0 - 4.0); }, eta, eps, 1e-12);
    REQUIRE(std::abs(acc.mean() - expected) <= 3.0 * acc.std_error());
}
