#include "seqkern/experiments.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "seqkern/summation.hpp"

namespace seqkern {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(r) for r = 0..count-1 on a small pool.  Work is handed out through
/// an atomic counter; each call writes only its own slot, so scheduling can
/// never change the reduced result.  The first exception wins and is
/// rethrown after the join (lowest replication index, for determinism).
template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
    threads = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads),
                                                      std::max<std::int64_t>(count, 1)));
    if (threads <= 1) {
        for (std::int64_t r = 0; r < count; ++r) fn(r);
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::int64_t first_error_index = -1;

    auto worker = [&] {
        constexpr std::int64_t kChunk = 8;
        for (;;) {
            const std::int64_t begin = next.fetch_add(kChunk);
            if (begin >= count) return;
            const std::int64_t end = std::min(begin + kChunk, count);
            for (std::int64_t r = begin; r < end; ++r) {
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (first_error_index < 0 || r < first_error_index) {
                        first_error = std::current_exception();
                        first_error_index = r;
                    }
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> tabulate_coefficient(const CoefficientFunction& f, std::int64_t n) {
    std::vector<double> coeffs(static_cast<std::size_t>(n));
    for (std::int64_t k = 1; k <= n; ++k) {
        const double s = f(static_cast<double>(k) / static_cast<double>(n));
        if (!std::isfinite(s))
            throw std::runtime_error("coefficient non-finite at k = " + std::to_string(k));
        coeffs[static_cast<std::size_t>(k - 1)] = s;
    }
    return coeffs;
}

/// Simulate replication r of size n into a reusable Path buffer.  Matches
/// simulate_path(config, r) bit for bit: same stream key, same recursion.
void simulate_into(Path& path, const std::vector<double>& coeffs, const ModelConfig& config,
                   std::uint64_t replication) {
    Xoshiro256PlusPlus rng(config.seed, static_cast<std::uint64_t>(config.n), replication);
    NoiseSampler draw(config.noise, rng);
    run_recursion(coeffs, config.y0, draw, path.values, path.noise);
}

}  // namespace

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::sequential: return "sequential";
        case EstimatorKind::adaptive: return "adaptive";
        case EstimatorKind::nonsequential_baseline: return "baseline";
    }
    return "unknown";
}

double nonsequential_baseline(const Path& path, const KernelWindow& window) {
    NeumaierSum num, den;
    const std::int64_t hi = std::min(path.n(), window.k_upper);
    for (std::int64_t j = std::max<std::int64_t>(1, window.k_star); j <= hi; ++j) {
        const double prev = path.values[static_cast<std::size_t>(j - 1)];
        num.add(prev * path.values[static_cast<std::size_t>(j)]);
        den.add(prev * prev);
    }
    if (den.value() == 0.0)
        throw std::runtime_error("nonsequential_baseline: zero in-window denominator");
    return num.value() / den.value();
}

RiskTable run_risk(const RiskExperiment& experiment) {
    if (experiment.replications < 1)
        throw std::invalid_argument("run_risk: replications must be >= 1");
    if (experiment.n_values.empty())
        throw std::invalid_argument("run_risk: n_values must be nonempty");
    if (!(experiment.z0 > 0.0 && experiment.z0 < 1.0))
        throw std::invalid_argument("run_risk: z0 in (0,1)");

    RiskTable table;
    const double target = experiment.coefficient(experiment.z0);
    const std::int64_t M = experiment.replications;

    for (const std::int64_t n : experiment.n_values) {
        ModelConfig config;
        config.n = n;
        config.y0 = experiment.y0;
        config.coefficient = experiment.coefficient;
        config.noise = experiment.noise;
        config.seed = experiment.master_seed;

        std::vector<double> abs_err(static_cast<std::size_t>(M), 0.0);
        std::vector<double> tau_ratio(static_cast<std::size_t>(M), 0.0);
        std::vector<unsigned char> hit(static_cast<std::size_t>(M), 0);
        std::vector<unsigned char> has_tau(static_cast<std::size_t>(M), 0);

        try {
            const std::vector<double> coeffs = tabulate_coefficient(experiment.coefficient, n);
            const ProcedureParams& prm = experiment.params;

            if (experiment.estimator == EstimatorKind::adaptive) {
                const AdaptiveGrid grid =
                    prm.kappa_regime == KappaRegime::nonadaptive
                        ? build_grid_kappa(n, prm.beta_low, prm.beta_high,
                                           prm.lambda_factor, kappa_nonadaptive(n))
                        : build_grid(n, prm.beta_low, prm.beta_high, prm.lambda_factor);
                parallel_for(M, experiment.threads, [&](std::int64_t r) {
                    thread_local Path path;
                    path.values.resize(static_cast<std::size_t>(n) + 1);
                    path.noise.resize(static_cast<std::size_t>(n));
                    simulate_into(path, coeffs, config, static_cast<std::uint64_t>(r));
                    const AdaptiveResult a =
                        adaptive_estimate(path, experiment.z0, grid, prm.eps, prm.threshold_gamma);
                    abs_err[static_cast<std::size_t>(r)] = std::fabs(a.estimate - target);
                    const auto& sel = a.per_level[static_cast<std::size_t>(a.k_selected)];
                    hit[static_cast<std::size_t>(r)] = sel.hit ? 1 : 0;
                    has_tau[static_cast<std::size_t>(r)] = sel.hit ? 1 : 0;
                    if (sel.hit)
                        tau_ratio[static_cast<std::size_t>(r)] =
                            static_cast<double>(sel.tau - sel.pilot.nu) / sel.H;
                });
            } else {
                const double kappa = prm.kappa_regime == KappaRegime::nonadaptive
                                         ? kappa_nonadaptive(n)
                                         : kappa_adaptive(n);
                const double h = bandwidth(prm.beta, kappa);
                const KernelWindow window = make_window(n, experiment.z0, h);
                const double alpha = prm.beta - 1.0;
                const bool baseline =
                    experiment.estimator == EstimatorKind::nonsequential_baseline;

                parallel_for(M, experiment.threads, [&](std::int64_t r) {
                    thread_local Path path;
                    path.values.resize(static_cast<std::size_t>(n) + 1);
                    path.noise.resize(static_cast<std::size_t>(n));
                    simulate_into(path, coeffs, config, static_cast<std::uint64_t>(r));
                    if (baseline) {
                        const double est = nonsequential_baseline(path, window);
                        abs_err[static_cast<std::size_t>(r)] = std::fabs(est - target);
                        hit[static_cast<std::size_t>(r)] = 1;
                    } else {
                        const PilotResult pilot =
                            compute_pilot(path, window, alpha, prm.eps, prm.threshold_gamma);
                        const SequentialResult s = sequential_estimate(path, window, pilot);
                        abs_err[static_cast<std::size_t>(r)] = std::fabs(s.estimate - target);
                        hit[static_cast<std::size_t>(r)] = s.hit ? 1 : 0;
                        has_tau[static_cast<std::size_t>(r)] = s.hit ? 1 : 0;
                        if (s.hit)
                            tau_ratio[static_cast<std::size_t>(r)] =
                                static_cast<double>(s.tau - pilot.nu) / s.H;
                    }
                });
            }
        } catch (const std::exception& e) {
            table.partial = true;
            table.diagnostics.push_back("n = " + std::to_string(n) + ": " + e.what());
            continue;
        }

        // Fixed-order extended-precision reduction; workers never touch it.
        long double sum_err = 0.0L, sum_err_sq = 0.0L, sum_ratio = 0.0L;
        std::int64_t hits = 0, taus = 0;
        for (std::int64_t r = 0; r < M; ++r) {
            const auto i = static_cast<std::size_t>(r);
            sum_err += abs_err[i];
            sum_err_sq += static_cast<long double>(abs_err[i]) * abs_err[i];
            if (hit[i]) ++hits;
            if (has_tau[i]) {
                ++taus;
                sum_ratio += tau_ratio[i];
            }
        }
        const long double mean = sum_err / M;
        long double var = 0.0L;
        if (M > 1) var = std::max(0.0L, (sum_err_sq - mean * mean * M) / (M - 1));

        RiskRow row;
        row.n = n;
        row.estimator = experiment.estimator;
        row.noise = experiment.noise.family;
        row.M = M;
        row.risk = static_cast<double>(mean);
        row.std_error = static_cast<double>(std::sqrt(var / M));
        row.miss_rate = 1.0 - static_cast<double>(hits) / static_cast<double>(M);
        row.mean_tau_over_H =
            taus > 0 ? static_cast<double>(sum_ratio / taus)
                     : std::numeric_limits<double>::quiet_NaN();
        row.seed = experiment.master_seed;
        table.rows.push_back(row);
    }
    return table;
}

std::vector<RateRatio> rate_check(const RiskTable& table, double beta) {
    std::vector<RateRatio> out;
    const double expo = beta / (2.0 * beta + 1.0);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j = i + 1; j < table.rows.size(); ++j) {
            const RiskRow& a = table.rows[i];
            const RiskRow& b = table.rows[j];
            if (a.estimator != b.estimator || a.noise != b.noise) continue;
            RateRatio r;
            r.n1 = a.n;
            r.n2 = b.n;
            r.empirical_ratio = a.risk / b.risk;
            r.theoretical_ratio =
                std::pow(static_cast<double>(b.n) / static_cast<double>(a.n), expo);
            out.push_back(r);
        }
    }
    return out;
}

std::vector<SequentialResult> replicate_sequential(const CoefficientFunction& coefficient,
                                                   const NoiseSpec& noise, double z0,
                                                   std::int64_t n, std::int64_t replications,
                                                   std::uint64_t master_seed,
                                                   const ProcedureParams& params,
                                                   int threads) {
    const double kappa = params.kappa_regime == KappaRegime::nonadaptive
                             ? kappa_nonadaptive(n)
                             : kappa_adaptive(n);
    const double h = bandwidth(params.beta, kappa);
    const KernelWindow window = make_window(n, z0, h);
    const double alpha = params.beta - 1.0;
    const std::vector<double> coeffs = tabulate_coefficient(coefficient, n);

    ModelConfig config;
    config.n = n;
    config.coefficient = coefficient;
    config.noise = noise;
    config.seed = master_seed;

    std::vector<SequentialResult> out(static_cast<std::size_t>(replications));
    parallel_for(replications, threads, [&](std::int64_t r) {
        thread_local Path path;
        path.values.resize(static_cast<std::size_t>(n) + 1);
        path.noise.resize(static_cast<std::size_t>(n));
        simulate_into(path, coeffs, config, static_cast<std::uint64_t>(r));
        const PilotResult pilot =
            compute_pilot(path, window, alpha, params.eps, params.threshold_gamma);
        out[static_cast<std::size_t>(r)] = sequential_estimate(path, window, pilot);
    });
    return out;
}

}  // namespace seqkern
