// seqkern: sequential kernel estimation for varying-coefficient
// autoregressions, with a Monte Carlo risk harness.
//
// Subcommands: simulate, estimate, adaptive, risk-table, verify-class,
// diagnostics.  Exit codes: 0 success, 2 validation error, 3 runtime
// (degenerate-data) error.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqkern/experiments.hpp"
#include "seqkern/table_io.hpp"

namespace {

using namespace seqkern;

constexpr double kInvSqrt2 = 0.7071067811865475244;  // §-standard z0 = 1/sqrt(2)

int default_threads() {
    if (const char* env = std::getenv("SEQKERN_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // resolve to hardware concurrency
}

CoefficientFunction parse_function(const std::string& name, double z0) {
    if (name == "zero") return CoefficientFunction::constant(0.0);
    if (name.rfind("const:", 0) == 0)
        return CoefficientFunction::constant(std::stod(name.substr(6)));
    if (name.rfind("demo-", 0) == 0) {
        const double alpha = std::stod(name.substr(5));
        if (!(alpha > 0.0 && alpha < 1.0))
            throw CLI::ValidationError("--function", "demo-<alpha> needs alpha in (0,1)");
        return CoefficientFunction::signed_power(z0, alpha);
    }
    throw CLI::ValidationError("--function",
                               "unknown function '" + name +
                                   "' (use zero | const:<c> | demo-<alpha>)");
}

NoiseSpec parse_noise(const std::string& name) {
    if (name == "gaussian") return NoiseSpec::gaussian();
    if (name == "uniform") return NoiseSpec::uniform();
    if (name == "exponential") return NoiseSpec::exponential();
    throw CLI::ValidationError("--noise", "unknown noise family '" + name + "'");
}

/// Expand `--config FILE` into the flag tokens it stands for.  The file is
/// flat key=value text: one option per line, `#` comments, blank lines and
/// `[section]` headers ignored.  Expansion happens in place, so the keys land
/// in whichever subcommand the --config flag was written under.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--config" && i + 1 < argc) {
            std::ifstream f(argv[++i]);
            if (!f) throw std::invalid_argument(std::string("cannot read config file ") + argv[i]);
            std::string line;
            while (std::getline(f, line)) {
                const auto first = line.find_first_not_of(" \t");
                if (first == std::string::npos) continue;
                const auto last = line.find_last_not_of(" \t\r");
                line = line.substr(first, last - first + 1);
                if (line.empty() || line[0] == '#' || line[0] == '[') continue;
                const auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("config line is not key=value: " + line);
                auto trim = [](std::string v) {
                    const auto a = v.find_first_not_of(" \t");
                    if (a == std::string::npos) return std::string();
                    const auto b = v.find_last_not_of(" \t");
                    return v.substr(a, b - a + 1);
                };
                const std::string key = trim(line.substr(0, eq));
                const std::string value = trim(line.substr(eq + 1));
                if (key.empty()) throw std::invalid_argument("empty key in config line: " + line);
                args.push_back("--" + key);
                if (!value.empty()) args.push_back(value);
            }
        } else {
            args.emplace_back(argv[i]);
        }
    }
    return args;
}

void write_artifact(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + out_path);
    f << content;
}

struct PresetConfig {
    EstimatorKind estimator;
    std::string function;
    std::string noise;
    ProcedureParams params;
};

PresetConfig lookup_preset(const std::string& preset) {
    ProcedureParams nonadaptive;  // beta = 1.3, eps = 0.1, kappa = 1/n
    nonadaptive.threshold_gamma = ThresholdGamma::fixed_center;
    ProcedureParams adaptive;
    // grid bandwidths from kappa = 1/n: the scaling under which the published
    // adaptive table is reachable at every listed n (see README)
    adaptive.kappa_regime = KappaRegime::nonadaptive;
    adaptive.threshold_gamma = ThresholdGamma::fixed_center;

    if (preset == "paper-7.1-gaussian")
        return {EstimatorKind::sequential, "demo-0.3", "gaussian", nonadaptive};
    if (preset == "paper-7.1-uniform")
        return {EstimatorKind::sequential, "demo-0.3", "uniform", nonadaptive};
    if (preset == "paper-7.1-exponential")
        return {EstimatorKind::sequential, "demo-0.3", "exponential", nonadaptive};
    if (preset == "paper-7.2-baseline")
        return {EstimatorKind::nonsequential_baseline, "demo-0.3", "gaussian", nonadaptive};
    if (preset == "paper-7.3-adaptive")
        return {EstimatorKind::adaptive, "demo-0.7", "gaussian", adaptive};
    throw CLI::ValidationError("--preset", "unknown preset '" + preset + "'");
}

std::string sequential_result_json(const SequentialResult& s) {
    std::string out = "{\n";
    out += "  \"estimate\": " + format_double(s.estimate) + ",\n";
    out += "  \"hit\": " + std::string(s.hit ? "true" : "false") + ",\n";
    out += "  \"tau\": " + std::to_string(s.tau) + ",\n";
    out += "  \"kappa_corr\": " + format_double(s.kappa_corr) + ",\n";
    out += "  \"H\": " + format_double(s.H) + ",\n";
    out += "  \"phi\": " + format_double(s.pilot.phi) + ",\n";
    out += "  \"pilot_s_hat\": " + format_double(s.pilot.s_hat) + ",\n";
    out += "  \"pilot_s_tilde\": " + format_double(s.pilot.s_tilde) + ",\n";
    out += "  \"pilot_nu\": " + std::to_string(s.pilot.nu) + ",\n";
    out += "  \"pilot_iota\": " + std::to_string(s.pilot.iota) + ",\n";
    out += "  \"eps_tilde\": " + format_double(s.pilot.eps_tilde) + ",\n";
    out += "  \"eps\": " + format_double(s.pilot.eps) + ",\n";
    out += "  \"k_star\": " + std::to_string(s.window.k_star) + ",\n";
    out += "  \"k_upper\": " + std::to_string(s.window.k_upper) + ",\n";
    out += "  \"h\": " + format_double(s.window.h) + "\n";
    out += "}\n";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "sequential kernel estimation for varying-coefficient autoregressions\n"
        "(any subcommand accepts --config FILE with flat key=value lines)"};
    app.require_subcommand(1);
    // `--h` is a bandwidth option below, so help stays on --help only.
    app.set_help_flag("--help", "print help");

    // ---- shared option state ------------------------------------------------
    std::int64_t n = 10000;
    double z0 = kInvSqrt2;
    double beta = 1.3, eps = 0.1, h_override = 0.0;
    double beta_low = 1.6, beta_high = 1.8, lambda_factor = 1.05;
    std::string noise = "gaussian", function, preset, out_path, format = "csv";
    std::uint64_t seed = 1;
    std::int64_t M = 30000;
    int threads = default_threads();
    double y0 = 0.0;
    std::string threshold_gamma = "pilot";
    std::string kappa_regime;

    // ---- simulate -----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "simulate one trajectory of the model");
    sim->set_help_flag("--help", "print help");
    sim->add_option("--n", n, "sample size (>= 2)")->check(CLI::Range(std::int64_t(2), std::int64_t(100000000)));
    sim->add_option("--function", function, "coefficient: zero | const:<c> | demo-<alpha>")->required();
    sim->add_option("--z0", z0, "center point in (0,1) for demo functions");
    sim->add_option("--noise", noise, "gaussian | uniform | exponential");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--y0", y0, "initial state");
    sim->add_option("--out", out_path, "output file (default stdout)");
    sim->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    // ---- estimate -----------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "sequential pointwise estimate on one path");
    est->set_help_flag("--help", "print help");
    est->add_option("--n", n, "sample size")->check(CLI::Range(std::int64_t(3), std::int64_t(100000000)));
    est->add_option("--z0", z0, "estimation point in (0,1)");
    est->add_option("--beta", beta, "regularity, bandwidth = n^{-1/(2 beta + 1)}");
    est->add_option("--h", h_override, "explicit bandwidth (overrides --beta rule)");
    est->add_option("--eps", eps, "stability margin for the projection");
    est->add_option("--function", function, "coefficient (default demo-<beta-1>)");
    est->add_option("--noise", noise, "gaussian | uniform | exponential");
    est->add_option("--seed", seed, "RNG seed");
    est->add_option("--threshold-gamma", threshold_gamma,
                    "pilot | center (threshold calibration)")
        ->check(CLI::IsMember({"pilot", "center"}));
    est->add_option("--out", out_path, "output file (default stdout)");

    // ---- adaptive -----------------------------------------------------------
    auto* ada = app.add_subcommand("adaptive", "Lepskii-adaptive estimate on one path");
    ada->set_help_flag("--help", "print help");
    ada->add_option("--n", n, "sample size")->check(CLI::Range(std::int64_t(3), std::int64_t(100000000)));
    ada->add_option("--z0", z0, "estimation point in (0,1)");
    ada->add_option("--beta-low", beta_low, "lower regularity bound");
    ada->add_option("--beta-high", beta_high, "upper regularity bound");
    ada->add_option("--lambda-factor", lambda_factor, "threshold factor > 1");
    ada->add_option("--eps", eps, "stability margin");
    ada->add_option("--function", function, "coefficient (default demo-0.7)");
    ada->add_option("--noise", noise, "gaussian | uniform | exponential");
    ada->add_option("--seed", seed, "RNG seed");
    ada->add_option("--threshold-gamma", threshold_gamma,
                    "pilot | center (threshold calibration)")
        ->check(CLI::IsMember({"pilot", "center"}));
    ada->add_option("--out", out_path, "output file (default stdout)");

    // ---- risk-table ---------------------------------------------------------
    std::vector<std::int64_t> n_list;
    std::string estimator_name = "sequential";
    auto* risk = app.add_subcommand("risk-table", "Monte Carlo risk table");
    risk->set_help_flag("--help", "print help");
    risk->add_option("--preset", preset,
                     "paper-7.1-gaussian | paper-7.1-uniform | paper-7.1-exponential | "
                     "paper-7.2-baseline | paper-7.3-adaptive");
    risk->add_option("--estimator", estimator_name, "sequential | adaptive | baseline");
    risk->add_option("--n", n_list, "sample sizes (repeatable)");
    risk->add_option("--M", M, "replications per cell");
    risk->add_option("--function", function, "coefficient");
    risk->add_option("--noise", noise, "gaussian | uniform | exponential");
    risk->add_option("--z0", z0, "estimation point");
    risk->add_option("--beta", beta, "regularity (sequential/baseline)");
    risk->add_option("--beta-low", beta_low, "adaptive grid lower bound");
    risk->add_option("--beta-high", beta_high, "adaptive grid upper bound");
    risk->add_option("--lambda-factor", lambda_factor, "adaptive threshold factor");
    risk->add_option("--eps", eps, "stability margin");
    risk->add_option("--seed", seed, "master seed");
    risk->add_option("--threads", threads, "worker count (output bytes are unaffected)");
    risk->add_option("--kappa-regime", kappa_regime,
                     "nonadaptive (1/n) | adaptive (ln n / n); default: adaptive "
                     "estimator uses adaptive, others nonadaptive")
        ->check(CLI::IsMember({"nonadaptive", "adaptive"}));
    risk->add_option("--threshold-gamma", threshold_gamma,
                     "pilot | center (threshold calibration; presets use center)")
        ->check(CLI::IsMember({"pilot", "center"}));
    risk->add_option("--out", out_path, "output file (default stdout)");
    risk->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    // ---- verify-class -------------------------------------------------------
    std::string check = "stability";
    double L = 1.3, alpha = 0.3, varsigma = 2.0, holder_h = 0.05;
    std::int64_t grid_size = 10000, sample_size = 1000000;
    int k_max = 3;
    auto* ver = app.add_subcommand("verify-class", "numerical class-membership certificates");
    ver->set_help_flag("--help", "print help");
    ver->add_option("--function", function, "coefficient to check")->required();
    ver->add_option("--check", check, "stability | weak-holder | strong-holder | moments")
        ->check(CLI::IsMember({"stability", "weak-holder", "strong-holder", "moments"}));
    ver->add_option("--z0", z0, "center point");
    ver->add_option("--eps", eps, "stability margin");
    ver->add_option("--L", L, "derivative bound");
    ver->add_option("--alpha", alpha, "Holder exponent in (0,1)");
    ver->add_option("--h", holder_h, "window half-width for weak-holder");
    ver->add_option("--grid-size", grid_size, "verification grid points");
    ver->add_option("--noise", noise, "noise family for moments check");
    ver->add_option("--varsigma", varsigma, "moment-class parameter");
    ver->add_option("--k-max", k_max, "highest moment order (<= 8)");
    ver->add_option("--sample-size", sample_size, "Monte Carlo draws for moments");
    ver->add_option("--seed", seed, "RNG seed for moments");

    // ---- diagnostics --------------------------------------------------------
    auto* diag = app.add_subcommand("diagnostics", "martingale and stopping-time diagnostics");
    diag->set_help_flag("--help", "print help");
    diag->add_option("--n", n, "sample size");
    diag->add_option("--M", M, "replications");
    diag->add_option("--z0", z0, "estimation point");
    diag->add_option("--beta", beta, "regularity");
    diag->add_option("--eps", eps, "stability margin");
    diag->add_option("--function", function, "coefficient (default zero)");
    diag->add_option("--noise", noise, "gaussian | uniform | exponential");
    diag->add_option("--seed", seed, "master seed");
    diag->add_option("--threads", threads, "worker count");
    diag->add_option("--threshold-gamma", threshold_gamma,
                     "pilot | center (threshold calibration)")
        ->check(CLI::IsMember({"pilot", "center"}));

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 vector parse order
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sim->parsed()) {
            ModelConfig config;
            config.n = n;
            config.y0 = y0;
            config.coefficient = parse_function(function, z0);
            config.noise = parse_noise(noise);
            config.seed = seed;
            const Path path = simulate_path(config);
            std::string content;
            if (format == "json") {
                content = "[";
                for (std::size_t k = 0; k < path.values.size(); ++k) {
                    if (k) content += ", ";
                    content += format_double(path.values[k]);
                }
                content += "]\n";
            } else {
                content = "k,y\n";
                for (std::size_t k = 0; k < path.values.size(); ++k)
                    content += std::to_string(k) + "," + format_double(path.values[k]) + "\n";
            }
            write_artifact(out_path, content);
            return 0;
        }

        if (est->parsed()) {
            const double h =
                h_override > 0.0 ? h_override : bandwidth(beta, kappa_nonadaptive(n));
            ModelConfig config;
            config.n = n;
            config.coefficient = function.empty()
                                     ? CoefficientFunction::signed_power(z0, beta - 1.0)
                                     : parse_function(function, z0);
            config.noise = parse_noise(noise);
            config.seed = seed;
            const Path path = simulate_path(config);
            const KernelWindow window = make_window(n, z0, h);
            const ThresholdGamma tg = threshold_gamma == "center"
                                          ? ThresholdGamma::fixed_center
                                          : ThresholdGamma::pilot_projected;
            const PilotResult pilot = compute_pilot(path, window, beta - 1.0, eps, tg);
            const SequentialResult s = sequential_estimate(path, window, pilot);
            write_artifact(out_path, sequential_result_json(s));
            return 0;
        }

        if (ada->parsed()) {
            ModelConfig config;
            config.n = n;
            config.coefficient = function.empty()
                                     ? CoefficientFunction::signed_power(z0, 0.7)
                                     : parse_function(function, z0);
            config.noise = parse_noise(noise);
            config.seed = seed;
            const Path path = simulate_path(config);
            const AdaptiveGrid grid = build_grid(n, beta_low, beta_high, lambda_factor);
            const ThresholdGamma tg = threshold_gamma == "center"
                                          ? ThresholdGamma::fixed_center
                                          : ThresholdGamma::pilot_projected;
            const AdaptiveResult a = adaptive_estimate(path, z0, grid, eps, tg);
            std::string content = "{\n";
            content += "  \"estimate\": " + format_double(a.estimate) + ",\n";
            content += "  \"k_selected\": " + std::to_string(a.k_selected) + ",\n";
            content += "  \"levels\": " + std::to_string(a.per_level.size()) + ",\n";
            content += "  \"lambda_check\": " + format_double(a.lambda_check) + ",\n";
            content += "  \"level_estimates\": [";
            for (std::size_t k = 0; k < a.per_level.size(); ++k) {
                if (k) content += ", ";
                content += format_double(a.per_level[k].estimate);
            }
            content += "]\n}\n";
            write_artifact(out_path, content);
            return 0;
        }

        if (risk->parsed()) {
            RiskExperiment exp;
            if (!preset.empty()) {
                const PresetConfig pc = lookup_preset(preset);
                exp.estimator = pc.estimator;
                if (function.empty()) function = pc.function;
                if (risk->count("--noise") == 0) noise = pc.noise;
                exp.params = pc.params;
                exp.params.eps = eps;
                exp.params.lambda_factor = lambda_factor;
                if (n_list.empty()) n_list = {1000, 5000, 10000, 20000};
            } else {
                if (estimator_name == "sequential") exp.estimator = EstimatorKind::sequential;
                else if (estimator_name == "adaptive") exp.estimator = EstimatorKind::adaptive;
                else if (estimator_name == "baseline")
                    exp.estimator = EstimatorKind::nonsequential_baseline;
                else throw CLI::ValidationError("--estimator", "unknown estimator");
                exp.params.beta = beta;
                exp.params.eps = eps;
                exp.params.beta_low = beta_low;
                exp.params.beta_high = beta_high;
                exp.params.lambda_factor = lambda_factor;
                exp.params.kappa_regime = exp.estimator == EstimatorKind::adaptive
                                              ? KappaRegime::adaptive
                                              : KappaRegime::nonadaptive;
                if (!kappa_regime.empty())
                    exp.params.kappa_regime = kappa_regime == "adaptive"
                                                  ? KappaRegime::adaptive
                                                  : KappaRegime::nonadaptive;
                if (function.empty())
                    throw CLI::ValidationError("--function", "required without --preset");
                if (n_list.empty())
                    throw CLI::ValidationError("--n", "required without --preset");
            }
            if (!preset.empty() && !kappa_regime.empty())
                exp.params.kappa_regime = kappa_regime == "adaptive"
                                              ? KappaRegime::adaptive
                                              : KappaRegime::nonadaptive;
            if (risk->count("--threshold-gamma") > 0)
                exp.params.threshold_gamma = threshold_gamma == "center"
                                                 ? ThresholdGamma::fixed_center
                                                 : ThresholdGamma::pilot_projected;
            exp.coefficient = parse_function(function, z0);
            exp.noise = parse_noise(noise);
            exp.z0 = z0;
            exp.n_values = n_list;
            exp.replications = M;
            exp.master_seed = seed;
            exp.threads = threads;

            const RiskTable table = run_risk(exp);
            write_artifact(out_path, format == "json" ? to_json(table) : to_csv(table));
            if (table.partial) {
                for (const auto& d : table.diagnostics) std::cerr << "aborted row: " << d << "\n";
                return 3;
            }
            return 0;
        }

        if (ver->parsed()) {
            const CoefficientFunction f = parse_function(function, z0);
            std::string content;
            if (check == "stability") {
                const StabilityVerdict v =
                    verify_stability(f, eps, L, static_cast<std::size_t>(grid_size));
                content = v.pass ? "pass\n"
                                 : "fail at x = " + format_double(v.witness_x) + ": " +
                                       v.reason + "\n";
            } else if (check == "weak-holder") {
                const double defect =
                    weak_holder_defect(f, z0, holder_h, static_cast<std::size_t>(grid_size));
                content = "defect " + format_double(defect) + "\n";
            } else if (check == "strong-holder") {
                const double c =
                    strong_holder_constant(f, z0, alpha, static_cast<std::size_t>(grid_size));
                content = "holder_constant " + format_double(c) + "\n";
            } else {
                const auto checks = verify_moment_class(parse_noise(noise), varsigma, k_max,
                                                        static_cast<std::size_t>(sample_size),
                                                        seed);
                for (const auto& c : checks)
                    content += "k=" + std::to_string(c.k) + " empirical=" +
                               format_double(c.empirical) + " bound=" + format_double(c.bound) +
                               " " + (c.pass ? "pass" : "fail") + "\n";
            }
            write_artifact(out_path, content);
            return 0;
        }

        if (diag->parsed()) {
            ProcedureParams params;
            params.beta = beta;
            params.eps = eps;
            params.threshold_gamma = threshold_gamma == "center"
                                         ? ThresholdGamma::fixed_center
                                         : ThresholdGamma::pilot_projected;
            const CoefficientFunction f = function.empty()
                                              ? CoefficientFunction::constant(0.0)
                                              : parse_function(function, z0);
            const auto results = replicate_sequential(f, parse_noise(noise), z0, n, M, seed,
                                                      params, threads);
            const ZetaSummary zs = zeta_diagnostics(results);
            std::int64_t hits = 0;
            long double ratio_sum = 0.0L;
            for (const auto& r : results)
                if (r.hit) {
                    ++hits;
                    ratio_sum += static_cast<long double>(r.tau - r.pilot.nu) / r.H;
                }
            std::string content;
            content += "replications " + std::to_string(results.size()) + "\n";
            content += "miss_rate " +
                       format_double(1.0 - static_cast<double>(hits) /
                                               static_cast<double>(results.size())) + "\n";
            content += "zeta_second_moment " + format_double(zs.second_moment) + "\n";
            content += "zeta_second_moment_hits " + format_double(zs.second_moment_hits) + "\n";
            content += "zeta_ks_normal_hits " + format_double(zs.ks_normal) + "\n";
            for (const auto& [z, rate] : zs.tail_exceed_rates)
                content += "zeta_exceed_" + format_double(z) + " " + format_double(rate) +
                           " bound " + format_double(2.0 * std::exp(-z * z / 8.0)) + "\n";
            content += "mean_tau_minus_nu_over_H " +
                       format_double(hits ? static_cast<double>(ratio_sum / hits) : 0.0) + "\n";
            write_artifact(out_path, content);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
