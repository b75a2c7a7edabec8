#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "seqkern/pilot.hpp"

using namespace seqkern;

namespace {

constexpr double kZ0 = 0.7071067811865475244;

NoiseSpec zero_noise() {
    return NoiseSpec::custom([](Xoshiro256PlusPlus&) { return 0.0; });
}

}  // namespace

TEST_CASE("gamma_of: closed form and domain") {
    CHECK(gamma_of(0.0) == 1.0);
    CHECK(gamma_of(kZ0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gamma_of(0.9) == doctest::Approx(0.19).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_of(1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_of(-1.2), std::domain_error);
}

TEST_CASE("project_estimate: clamping, idempotence, 1-Lipschitz") {
    CHECK(project_estimate(0.3, 0.1) == 0.3);
    CHECK(project_estimate(5.0, 0.1) == 0.9);
    CHECK(project_estimate(-5.0, 0.1) == -0.9);

    Xoshiro256PlusPlus rng(77);
    for (int i = 0; i < 500; ++i) {
        const double eps = 0.01 + 0.8 * rng.uniform01();
        const double a = 6.0 * (rng.uniform01() - 0.5);
        const double b = 6.0 * (rng.uniform01() - 0.5);
        const double pa = project_estimate(a, eps);
        CHECK(project_estimate(pa, eps) == pa);
        CHECK(std::fabs(pa - project_estimate(b, eps)) <= std::fabs(a - b) + 1e-15);
        CHECK(std::fabs(pa) <= 1.0 - eps);
    }
}

TEST_CASE("pilot_estimate: noiseless constant coefficient is recovered exactly") {
    ModelConfig config;
    config.n = 200;
    config.y0 = 1.0;
    config.coefficient = CoefficientFunction::constant(0.5);
    config.noise = zero_noise();
    const Path path = simulate_path(config);
    const KernelWindow w = make_window(200, 0.5, 0.2);
    const PilotSize size = pilot_size(w, 0.5);
    const PilotEstimate e = pilot_estimate(path, w, size.nu);
    CHECK(e.a_nu > 0.0);
    CHECK(e.s_hat == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pilot_estimate: zero in-window states raise the degenerate error") {
    Path path;
    path.values.assign(201, 0.0);
    const KernelWindow w = make_window(200, 0.5, 0.2);
    CHECK_THROWS_AS(pilot_estimate(path, w, w.k_star + 10), degenerate_pilot_error);
}

TEST_CASE("compute_pilot maps a degenerate pilot to the class center") {
    Path path;
    path.values.assign(201, 0.0);
    const KernelWindow w = make_window(200, 0.5, 0.2);
    const PilotResult r = compute_pilot(path, w, 0.5, 0.1);
    CHECK(r.degenerate);
    CHECK(r.s_tilde == 0.0);
    CHECK(std::isnan(r.s_hat));
    // gamma(0) = 1 keeps the threshold at its conservative minimum
    CHECK(r.phi == doctest::Approx(2.0 * (1.0 - r.eps_tilde)).epsilon(1e-14));
}

TEST_CASE("compute_pilot: center calibration pins gamma at 1") {
    ModelConfig config;
    config.n = 2000;
    config.coefficient = CoefficientFunction::constant(0.0);
    config.noise = NoiseSpec::gaussian();
    config.seed = 404;
    const Path path = simulate_path(config);
    const KernelWindow w = make_window(2000, 0.5, 0.12);

    const PilotResult data = compute_pilot(path, w, 0.3, 0.1);
    const PilotResult center =
        compute_pilot(path, w, 0.3, 0.1, ThresholdGamma::fixed_center);
    CHECK(center.s_hat == data.s_hat);  // the pilot statistic itself is kept
    CHECK(center.s_tilde == 0.0);
    CHECK(center.phi == doctest::Approx(2.0 * (1.0 - center.eps_tilde)).epsilon(1e-14));
    CHECK(center.H <= data.H);  // gamma(0) = 1 is the H-minimizing calibration
}

TEST_CASE("threshold_H: formula cases") {
    SUBCASE("limit case eps_tilde = 0") {
        const Threshold t = threshold_H(0.0, 0.0, 100, 0.1);
        CHECK(t.phi == 2.0);
        CHECK(t.H == doctest::Approx(2.0 * 100 * 0.1).epsilon(1e-14));
    }
    SUBCASE("s_tilde = 1/sqrt(2), eps_tilde = 0.05") {
        const Threshold t = threshold_H(kZ0, 0.05, 100, 0.1);
        CHECK(t.phi == doctest::Approx(3.8).epsilon(1e-12));
    }
    SUBCASE("reference arithmetic at n = 1e4") {
        const Threshold t = threshold_H(0.0, 0.050387, 10000, 0.077368);
        CHECK(t.phi == doctest::Approx(1.899226).epsilon(1e-6));
        CHECK(t.H == doctest::Approx(1469.4).epsilon(1e-4));
    }
}

TEST_CASE("threshold_H bounds follow from the gamma range") {
    Xoshiro256PlusPlus rng(123);
    for (int i = 0; i < 500; ++i) {
        const double eps = 0.02 + 0.5 * rng.uniform01();
        const double s = (1.0 - eps) * (2.0 * rng.uniform01() - 1.0);
        const double eps_tilde = 0.9 * rng.uniform01();
        const std::int64_t n = 100 + static_cast<std::int64_t>(rng() % 10000);
        const double h = 0.01 + 0.3 * rng.uniform01();
        const Threshold t = threshold_H(s, eps_tilde, n, h);
        const double lo = 2.0 * (1.0 - eps_tilde) * static_cast<double>(n) * h;
        const double hi = lo / (eps * (2.0 - eps));
        CHECK(t.H >= lo - 1e-9);
        CHECK(t.H <= hi + 1e-9);
    }
}

TEST_CASE("pilot scatter at the reference configuration (Monte Carlo oracle)") {
    // The pilot sees only iota + 1 in-window points (about 40 at n = 1e4,
    // beta = 1.3), so its standard deviation is near 1/sqrt(40) ~ 0.16 and
    // roughly nine tenths of draws land within +-0.25 of the true value 0.
    const std::int64_t n = 10000;
    const double h = bandwidth(1.3, kappa_nonadaptive(n));
    const KernelWindow w = make_window(n, kZ0, h);
    const PilotSize size = pilot_size(w, 0.3);
    int within = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        ModelConfig config;
        config.n = n;
        config.coefficient = CoefficientFunction::constant(0.0);
        config.noise = NoiseSpec::gaussian();
        config.seed = 31337;
        const Path path = simulate_path(config, static_cast<std::uint64_t>(r));
        const PilotEstimate e = pilot_estimate(path, w, size.nu);
        if (std::fabs(e.s_hat) <= 0.25) ++within;
    }
    CHECK(within >= 850);
    CHECK(within <= 990);
}
