#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "vfmc/estimators.hpp"
#include "vfmc/symmetry.hpp"

using namespace vfmc;

namespace {

// moments from cumulants by the standard recursion
// m_n = sum_{k=0}^{n-1} C(n-1, k) kappa_{k+1} m_{n-1-k};
// for a Poisson integral the cumulants are kappa_k = nu(phi^k)
double moment_from_cumulants(int n, const std::vector<double>& kappa) {
    std::vector<double> m(static_cast<std::size_t>(n) + 1, 0.0);
    m[0] = 1.0;
    auto choose = [](int a, int b) {
        double c = 1.0;
        for (int i = 0; i < b; ++i) c = c * (a - i) / (i + 1);
        return c;
    };
    for (int j = 1; j <= n; ++j) {
        double s = 0.0;
        for (int k = 0; k < j; ++k) {
            s += choose(j - 1, k) * kappa[static_cast<std::size_t>(k + 1)] *
                 m[static_cast<std::size_t>(j - 1 - k)];
        }
        m[static_cast<std::size_t>(j)] = s;
    }
    return m[static_cast<std::size_t>(n)];
}

// gamma confined to small scales so windows of modest radius are exact
MultifractalMeasure compact_measure() {
    return MultifractalMeasure({{1.0 / 3.0, 1.0, 2.0, 0.0}}, 0.3);
}

McOptions quick_mc(std::uint64_t seed) {
    McOptions mc;
    mc.seed = seed;
    mc.workers = 1;
    return mc;
}

}  // namespace

TEST_CASE("fit_zeta is exact on power laws and invariant under rescaling") {
    std::vector<FitPoint> grid;
    for (int i = 0; i < 5; ++i) {
        const double eps = 0.01 * std::pow(10.0, i / 4.0);
        grid.push_back({eps, 3.0 * std::pow(eps, 0.667), 0.0});
    }
    const auto fit = fit_zeta(grid, 0.01, 0.1);
    REQUIRE(fit.zeta_hat == Catch::Approx(0.667).margin(1e-9));
    REQUIRE(fit.r_squared == Catch::Approx(1.0).margin(1e-9));

    std::vector<FitPoint> scaled = grid;
    for (auto& pt : scaled) pt.mean *= 17.0;
    const auto fit2 = fit_zeta(scaled, 0.01, 0.1);
    REQUIRE(fit2.zeta_hat == Catch::Approx(fit.zeta_hat).margin(1e-12));
    REQUIRE(fit2.intercept == Catch::Approx(fit.intercept + std::log(17.0)).margin(1e-9));
}

TEST_CASE("fit_zeta: analytic K41 slopes over the spec ranges") {
    const auto k41 = MultifractalMeasure::k41();
    std::vector<FitPoint> lower2, upper6;
    for (int i = 0; i < 9; ++i) {
        const double el = 1e-3 * std::pow(100.0, i / 8.0);
        lower2.push_back({el, k41.moment_lower(2, el), 0.0});
        const double eu = 1e-4 * std::pow(100.0, i / 8.0);
        upper6.push_back({eu, k41.moment_upper(6, eu), 0.0});
    }
    REQUIRE(fit_zeta(lower2, 1e-3, 1e-1).zeta_hat == Catch::Approx(2.0 / 3.0).margin(1e-6));
    REQUIRE(fit_zeta(upper6, 1e-4, 1e-2).zeta_hat == Catch::Approx(2.0).margin(2e-2));
}

TEST_CASE("fit_zeta error paths") {
    std::vector<FitPoint> two = {{0.01, 1.0, 0.0}, {0.1, 2.0, 0.0}};
    REQUIRE_THROWS_AS(fit_zeta(two, 0.001, 1.0), FitDomainError);
    std::vector<FitPoint> neg = {{0.01, 1.0, 0.0}, {0.03, -0.5, 0.1}, {0.1, 2.0, 0.0}};
    REQUIRE_THROWS_AS(fit_zeta(neg, 0.001, 1.0), FitDomainError);
    try {
        fit_zeta(neg, 0.001, 1.0);
    } catch (const FitDomainError& e) {
        REQUIRE(std::string(e.what()).find("budget") != std::string::npos);
    }
}

TEST_CASE("single-filament estimator: odd moment vanishes, argument checks") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    const auto mc = quick_mc(555);
    const auto est = single_filament_moment(gamma, 0.1, spec, 3, 0.1, {0, 0, 0}, {1, 0, 0},
                                            IncrementKind::longitudinal, 20000, mc);
    REQUIRE(std::abs(est.mean) <= 3.0 * est.std_error);

    REQUIRE_THROWS_AS(single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                             IncrementKind::longitudinal, 50, mc),
                      ConfigError);
    REQUIRE_THROWS_AS(single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 1, 0},
                                             IncrementKind::longitudinal, 1000, mc),
                      ConfigError);
}

TEST_CASE("single-filament estimator is reproducible across worker counts") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    McOptions mc1 = quick_mc(321);
    McOptions mc3 = quick_mc(321);
    mc3.workers = 3;
    const auto a = single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                          IncrementKind::longitudinal, 30000, mc1);
    const auto b = single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                          IncrementKind::longitudinal, 30000, mc3);
    REQUIRE(a.mean == b.mean);
    REQUIRE(a.std_error == b.std_error);
}

TEST_CASE("nondirectional moment dominates the longitudinal one on matched draws") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    const auto mc = quick_mc(99);
    const auto lon = single_filament_moment(gamma, 0.1, spec, 2, 0.12, {0, 0, 0}, {1, 0, 0},
                                            IncrementKind::longitudinal, 20000, mc);
    const auto non = single_filament_moment(gamma, 0.1, spec, 2, 0.12, {0, 0, 0}, {1, 0, 0},
                                            IncrementKind::nondirectional, 20000, mc);
    REQUIRE(non.mean >= lon.mean);  // pointwise <v,e>^p <= |v|^p on the same samples
}

TEST_CASE("short-range estimate is invariant under doubling the start ball") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::zero_charge_quadratic();
    McOptions mc = quick_mc(2718);
    const auto base = single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                             IncrementKind::longitudinal, 60000, mc, 1);
    McOptions wide = mc;
    wide.r0_margin = 8.0;  // doubles the margin term of R0
    const auto doubled = single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                                IncrementKind::longitudinal, 240000, wide, 2);
    const double se = std::sqrt(base.std_error * base.std_error +
                                doubled.std_error * doubled.std_error);
    REQUIRE(std::abs(base.mean - doubled.mean) <= 3.0 * se);
}

TEST_CASE("budget doubling shrinks standard errors like sqrt(2)") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    const auto mc = quick_mc(10101);
    double ratio_sum = 0.0;
    const int reps = 6;
    for (int k = 0; k < reps; ++k) {
        const auto small = single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                                  IncrementKind::longitudinal, 20000, mc,
                                                  100 + 2 * k);
        const auto big = single_filament_moment(gamma, 0.1, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                                IncrementKind::longitudinal, 40000, mc,
                                                101 + 2 * k);
        ratio_sum += small.std_error / big.std_error;
    }
    REQUIRE(ratio_sum / reps == Catch::Approx(std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("poisson composition sum agrees with the cumulant recursion") {
    const std::vector<double> nu = {0.0, 0.37, 1.42, -0.6, 2.9, 0.44, 1.13};
    for (int p : {2, 4, 6}) {
        const double via_compositions = poisson_moment_from_intensity(p, nu);
        const double via_cumulants = moment_from_cumulants(p, nu);
        REQUIRE(via_compositions == Catch::Approx(via_cumulants).epsilon(1e-12));
    }
    // p = 2 closed form: nu(phi^2) + nu(phi)^2
    REQUIRE(poisson_moment_from_intensity(2, nu) ==
            Catch::Approx(nu[2] + nu[1] * nu[1]).epsilon(1e-14));
}

TEST_CASE("poisson moment check: identity holds, zero functional is zero") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    LocalizationWindow window;
    window.eta = 0.1;
    window.radius = std::cbrt(5.0 / (gamma.total_mass(0.1) * 4.0 * std::numbers::pi / 3.0));
    const auto mc = quick_mc(11);
    PhiSpec phi;
    phi.x = {0, 0, 0};
    phi.clip = 5.0;
    const auto report = poisson_moment_check(gamma, window, spec, phi, 4, 4000, 30000, mc);
    REQUIRE(report.intensity_mass == Catch::Approx(5.0).epsilon(1e-9));
    for (const auto& row : report.rows) {
        INFO("p=" << row.p << " measured=" << row.measured.mean
                  << " predicted=" << row.predicted.mean << " z=" << row.z);
        REQUIRE(std::abs(row.z) <= 3.0);
        REQUIRE(row.measured.mean <= row.upper_bound * 1.05);
    }

    // nonnegative functional: lower-bound branch E[mu(phi)^p] >= nu(phi^p)
    PhiSpec abs_phi = phi;
    abs_phi.absolute = true;
    const auto report2 = poisson_moment_check(gamma, window, spec, abs_phi, 4, 4000, 30000, mc);
    for (const auto& row : report2.rows) {
        const double slack =
            3.0 * std::sqrt(row.measured.std_error * row.measured.std_error +
                            row.predicted.std_error * row.predicted.std_error);
        REQUIRE(row.measured.mean >= row.lower_bound - slack);
    }

    // short-range kernel, probe far outside every filament: phi == 0
    PhiSpec far_phi = phi;
    far_phi.x = {50.0, 0.0, 0.0};
    const auto zero = poisson_moment_check(gamma, window, MollifierSpec::zero_charge_quadratic(),
                                           far_phi, 4, 500, 2000, mc);
    for (const auto& row : zero.rows) {
        REQUIRE(row.measured.mean == 0.0);
        REQUIRE(row.predicted.mean == 0.0);
    }
}

TEST_CASE("full-field estimator matches nu(increment^2) plus the Poisson correction") {
    // E[mu(d)^2] = nu(d)^2 + nu(d^2) and nu(d) = 0 by centering, so the
    // ensemble second moment must match the single-filament nu-moment
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    const double eta = 0.1;
    LocalizationWindow window;
    window.eta = eta;
    window.radius = 2.0;  // covers probe reach 0.1 + l_max 0.3 + 4 sqrt(T_max) 1.2
    const auto mc = quick_mc(13);

    ProbeSpec probe;
    probe.eps_grid = {0.1};
    const auto full = ensemble_structure_function(gamma, window, spec, probe, {2},
                                                  IncrementKind::longitudinal, 30000, mc);
    const auto single = single_filament_moment(gamma, eta, spec, 2, 0.1, {0, 0, 0}, {1, 0, 0},
                                               IncrementKind::longitudinal, 150000, mc);
    const auto& f = full[0].grid[0];
    const double se = std::sqrt(f.std_error * f.std_error + single.std_error * single.std_error);
    INFO("full=" << f.mean << "+-" << f.std_error << " single=" << single.mean << "+-"
                 << single.std_error);
    REQUIRE(std::abs(f.mean - single.mean) <= 3.0 * se);
}

TEST_CASE("margin violations and over-cap windows are rejected") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    const auto mc = quick_mc(1);
    LocalizationWindow tight;
    tight.eta = 0.1;
    tight.radius = 0.5;
    ProbeSpec probe;
    probe.eps_grid = {0.1};
    REQUIRE_THROWS_AS(ensemble_structure_function(gamma, tight, spec, probe, {2},
                                                  IncrementKind::longitudinal, 10, mc),
                      MarginViolationError);

    LocalizationWindow capped;
    capped.eta = 0.1;
    capped.radius = 3.0;
    capped.max_expected_count = 10.0;
    REQUIRE_THROWS_AS(ensemble_structure_function(gamma, capped, spec, probe, {2},
                                                  IncrementKind::longitudinal, 10, mc),
                      BudgetExceededError);
}

TEST_CASE("occupation scan: exact mean, short-time exponent, validation") {
    const auto mc = quick_mc(777);
    // p = 2 exact mean at a cheap point
    const auto quick = occupation_moment_scan({{0.2, 0.3}}, {2}, 0.0, 40000, mc);
    const auto& row = quick.rows[0];
    REQUIRE(std::abs(z_score(row.estimate, row.exact_mean)) <= 3.0);
    REQUIRE(std::abs(row.rel_error) < 0.10);

    // short-time regime: T-exponent p/2 at fixed ell
    const auto small_t = occupation_moment_scan(
        {{0.25, 0.002}, {0.25, 0.004}, {0.25, 0.008}, {0.25, 0.015}}, {2, 4}, 0.0, 30000, mc);
    bool found4 = false;
    for (const auto& fit : small_t.fits) {
        if (fit.axis == "T" && fit.p == 4) {
            found4 = true;
            REQUIRE(fit.regime == "short-time");
            REQUIRE(fit.expected == Catch::Approx(2.0));
            REQUIRE(fit.fit.zeta_hat == Catch::Approx(2.0).margin(0.3));
        }
        if (fit.axis == "T" && fit.p == 2) {
            REQUIRE(fit.fit.zeta_hat == Catch::Approx(1.0).margin(0.3));
        }
    }
    REQUIRE(found4);

    REQUIRE_THROWS_AS(occupation_moment_scan({{0.2, 0.5}}, {3}, 0.0, 1000, mc), ConfigError);
    // explicit R0 below the 4 sqrt(T) margin
    REQUIRE_THROWS_AS(occupation_moment_scan({{0.2, 0.5}}, {2}, 1.0, 1000, mc),
                      MarginViolationError);
}

TEST_CASE("occupation scan matches a brute-force path estimate on a small case") {
    // same streams, no early stop expected to trigger for beefy margins
    const auto mc = quick_mc(31415);
    const double ell = 0.3, horizon = 0.09;
    const auto scan = occupation_moment_scan({{ell, horizon}}, {2, 4}, 0.0, 20000, mc);

    const double r0 = ell + mc.r0_margin * std::sqrt(horizon);
    const double vol = (4.0 * std::numbers::pi / 3.0) * r0 * r0 * r0;
    BatchAccumulator acc2(mc.batches), acc4(mc.batches);
    const Ball ball{{0, 0, 0}, ell};
    for (int i = 0; i < 20000; ++i) {
        RngStream rng(mc.seed, StreamKind::occupation, 0, i);
        const Vec3 x0 = rng.uniform_ball(r0);
        const BrownianPath path =
            sample_path(x0, horizon, mc.step.dt_for(std::min(ell, std::sqrt(horizon)), horizon),
                        rng);
        const double occ = occupation_time(path, ball);
        const int batch = BatchAccumulator::batch_of(i, 20000, mc.batches);
        acc2.add(batch, vol * occ);
        acc4.add(batch, vol * occ * occ);
    }
    // early stopping may drop a vanishing fraction of path tails; the two
    // estimates must agree far inside one standard error
    REQUIRE(scan.rows[0].estimate.mean ==
            Catch::Approx(acc2.mean()).margin(0.02 * acc2.std_error()));
    REQUIRE(scan.rows[1].estimate.mean ==
            Catch::Approx(acc4.mean()).margin(0.02 * acc4.std_error()));
}

TEST_CASE("symmetry suite passes on a homogeneous isotropic configuration") {
    const auto gamma = compact_measure();
    const auto spec = MollifierSpec::indicator();
    LocalizationWindow window;
    window.eta = 0.1;
    window.radius = 2.2;
    McOptions mc = quick_mc(2025);
    SymmetryProbes probes;
    probes.x_shift = {0.3, 0.2, 0.1};
    const auto report = symmetry_suite(gamma, window, spec, probes, 6000, mc, 3.8);
    for (const auto& c : report.checks) {
        INFO(c.name << ": stat=" << c.z << " threshold=" << c.threshold);
        REQUIRE(c.pass);
    }
}
