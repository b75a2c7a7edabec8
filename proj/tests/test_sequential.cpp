#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "seqkern/sequential.hpp"

using namespace seqkern;

namespace {

constexpr double kZ0 = 0.7071067811865475244;

NoiseSpec zero_noise() {
    return NoiseSpec::custom([](Xoshiro256PlusPlus&) { return 0.0; });
}

Path gaussian_path(std::int64_t n, std::uint64_t seed, std::uint64_t replication = 0) {
    ModelConfig config;
    config.n = n;
    config.coefficient = CoefficientFunction::constant(0.0);
    config.noise = NoiseSpec::gaussian();
    config.seed = seed;
    return simulate_path(config, replication);
}

/// Independent reconstruction of the stopped mass with plain summation.
double brute_force_mass(const Path& path, const KernelWindow& w, std::int64_t nu,
                        std::int64_t tau, double kappa) {
    double acc = 0.0;
    for (std::int64_t j = nu + 1; j < tau; ++j)
        if (w.contains(j)) {
            const double y = path.values[static_cast<std::size_t>(j - 1)];
            acc += y * y;
        }
    if (w.contains(tau)) {
        const double y = path.values[static_cast<std::size_t>(tau - 1)];
        acc += kappa * y * y;
    }
    return acc;
}

}  // namespace

TEST_CASE("stopping_time: first increment crossing") {
    Path p;
    p.values.assign(101, 1.0);
    const KernelWindow w = make_window(100, 0.5, 0.1);
    const std::int64_t nu = 45;
    const StoppingResult s = stopping_time(p, w, nu, 0.5);
    CHECK(s.hit);
    CHECK(s.tau == nu + 1);
    CHECK(s.kappa_corr == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("stopping_time: flat-zero tail never stops") {
    Path p;
    p.values.assign(101, 1.0);
    for (std::size_t j = 45; j < p.values.size(); ++j) p.values[j] = 0.0;
    const KernelWindow w = make_window(100, 0.5, 0.1);
    const StoppingResult s = stopping_time(p, w, 45, 10.0);
    CHECK_FALSE(s.hit);
    CHECK(s.tau == 100);
    CHECK(s.kappa_corr == 1.0);
}

TEST_CASE("stopping_time: H reconstruction against a brute-force oracle") {
    const std::int64_t n = 2000;
    const double h = bandwidth(1.3, kappa_nonadaptive(n));
    const KernelWindow w = make_window(n, kZ0, h);
    int hits = 0;
    for (int r = 0; r < 200; ++r) {
        const Path p = gaussian_path(n, 8888, static_cast<std::uint64_t>(r));
        const PilotResult pilot = compute_pilot(p, w, 0.3, 0.1);
        const StoppingResult s = stopping_time(p, w, pilot.nu, pilot.H);
        CHECK(s.tau >= pilot.nu + 1);
        CHECK(s.tau <= n);
        if (!s.hit) continue;
        ++hits;
        CHECK(s.tau <= w.k_upper);
        CHECK(s.kappa_corr > 0.0);
        CHECK(s.kappa_corr <= 1.0);
        const double mass = brute_force_mass(p, w, pilot.nu, s.tau, s.kappa_corr);
        CHECK(std::fabs(mass - pilot.H) <= 1e-10 * pilot.H);
    }
    CHECK(hits > 0);
}

TEST_CASE("stopping_time: raising H never decreases tau") {
    const std::int64_t n = 1500;
    const KernelWindow w = make_window(n, 0.5, 0.1);
    for (int r = 0; r < 50; ++r) {
        const Path p = gaussian_path(n, 555, static_cast<std::uint64_t>(r));
        const std::int64_t nu = w.k_star + 10;
        std::int64_t prev_tau = 0;
        for (double H : {5.0, 20.0, 80.0, 200.0, 400.0}) {
            const StoppingResult s = stopping_time(p, w, nu, H);
            CHECK(s.tau >= prev_tau);
            prev_tau = s.tau;
        }
    }
}

TEST_CASE("sequential_estimate: noiseless near-unit coefficient is exact on a hit") {
    ModelConfig config;
    config.n = 400;
    config.y0 = 30.0;
    config.coefficient = CoefficientFunction::constant(0.999);
    config.noise = zero_noise();
    const Path path = simulate_path(config);
    const KernelWindow w = make_window(400, 0.5, 0.15);
    const PilotResult pilot = compute_pilot(path, w, 0.3, 0.01);
    CHECK(pilot.s_hat == doctest::Approx(0.999).epsilon(1e-12));
    const SequentialResult s = sequential_estimate(path, w, pilot);
    REQUIRE(s.hit);
    CHECK(s.estimate == doctest::Approx(0.999).epsilon(1e-12));
    CHECK(s.kappa_corr > 0.0);
    CHECK(s.kappa_corr <= 1.0);
    // noiseless path: the residual martingale is exactly zero
    CHECK(s.zeta_tilde == 0.0);
}

TEST_CASE("sequential_estimate: unreachable threshold gives the zero estimate") {
    ModelConfig config;
    config.n = 400;
    config.y0 = 1.0;
    config.coefficient = CoefficientFunction::constant(0.5);
    config.noise = zero_noise();
    const Path path = simulate_path(config);
    const KernelWindow w = make_window(400, 0.5, 0.15);
    const PilotResult pilot = compute_pilot(path, w, 0.3, 0.1);
    const SequentialResult s = sequential_estimate(path, w, pilot);
    CHECK_FALSE(s.hit);
    CHECK(s.estimate == 0.0);
    CHECK(s.kappa_corr == 1.0);
    CHECK(s.tau == 400);
}

TEST_CASE("sequential_estimate: zeta is NaN without realized noise") {
    Path p = gaussian_path(2000, 4242);
    const KernelWindow w = make_window(2000, 0.5, 0.1);
    const PilotResult pilot = compute_pilot(p, w, 0.3, 0.1);
    p.noise.clear();  // observational data
    const SequentialResult s = sequential_estimate(p, w, pilot);
    CHECK(std::isnan(s.zeta_tilde));
}

TEST_CASE("zeta_diagnostics: all-miss collection") {
    std::vector<SequentialResult> results(10);
    for (auto& r : results) {
        r.hit = false;
        r.zeta_tilde = 0.0;
    }
    const ZetaSummary s = zeta_diagnostics(results);
    CHECK(s.second_moment == 0.0);
    CHECK(s.hits == 0);
    CHECK(s.tail_exceed_rates.at(2.0) == 0.0);
    CHECK_THROWS_AS(zeta_diagnostics(std::vector<SequentialResult>{}),
                    std::invalid_argument);
}

TEST_CASE("zeta_diagnostics: second moment bound at desk scale") {
    const std::int64_t n = 2000;
    const double h = bandwidth(1.3, kappa_nonadaptive(n));
    const KernelWindow w = make_window(n, kZ0, h);
    std::vector<SequentialResult> results;
    for (int r = 0; r < 300; ++r) {
        const Path p = gaussian_path(n, 2023, static_cast<std::uint64_t>(r));
        const PilotResult pilot = compute_pilot(p, w, 0.3, 0.1);
        results.push_back(sequential_estimate(p, w, pilot));
    }
    const ZetaSummary s = zeta_diagnostics(results);
    CHECK(s.second_moment <= 1.1);  // theory bound is 1; slack for 300 draws
    CHECK(s.hits > 0);
    for (const auto& [z, rate] : s.tail_exceed_rates)
        CHECK(rate <= 2.0 * std::exp(-z * z / 8.0));
}

TEST_CASE("ks_distance_to_normal: sanity on known samples") {
    // a perfect normal quantile grid has tiny distance
    std::vector<double> grid;
    const int m = 2000;
    for (int i = 1; i <= m; ++i) {
        const double p = (static_cast<double>(i) - 0.5) / m;
        // inverse via bisection on normal_cdf
        double lo = -10.0, hi = 10.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (normal_cdf(mid) < p ? lo : hi) = mid;
        }
        grid.push_back(0.5 * (lo + hi));
    }
    CHECK(ks_distance_to_normal(grid) < 0.001);

    // a unit-mass atom at zero is distance ~1/2
    CHECK(ks_distance_to_normal(std::vector<double>(100, 0.0)) ==
          doctest::Approx(0.5).epsilon(1e-6));
}
