#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqkern/adaptive.hpp"

namespace seqkern {

enum class EstimatorKind { sequential, adaptive, nonsequential_baseline };

std::string to_string(EstimatorKind kind);

enum class KappaRegime { nonadaptive, adaptive };

struct ProcedureParams {
    double beta = 1.3;           // sequential / baseline bandwidth exponent
    double eps = 0.1;            // projection margin
    KappaRegime kappa_regime = KappaRegime::nonadaptive;
    double beta_low = 1.6;       // adaptive grid bounds
    double beta_high = 1.8;
    double lambda_factor = 1.05;
    ThresholdGamma threshold_gamma = ThresholdGamma::pilot_projected;
};

struct RiskExperiment {
    EstimatorKind estimator = EstimatorKind::sequential;
    CoefficientFunction coefficient;
    NoiseSpec noise;
    double z0 = 0.5;
    double y0 = 0.0;
    std::vector<std::int64_t> n_values;
    std::int64_t replications = 0;  // M
    std::uint64_t master_seed = 0;
    ProcedureParams params;
    int threads = 0;  // 0 = hardware concurrency
};

struct RiskRow {
    std::int64_t n = 0;
    EstimatorKind estimator = EstimatorKind::sequential;
    NoiseFamily noise = NoiseFamily::gaussian_unit;
    std::int64_t M = 0;
    double risk = 0.0;              // mean |estimate - S(z0)|
    double std_error = 0.0;         // sample std of |error| / sqrt(M)
    double miss_rate = 0.0;
    double mean_tau_over_H = 0.0;   // mean (tau - nu)/H over hit replications
    std::uint64_t seed = 0;
};

struct RiskTable {
    std::vector<RiskRow> rows;
    bool partial = false;                   // some row aborted
    std::vector<std::string> diagnostics;   // one message per aborted row
};

/// Non-sequential kernel ratio over the full sample,
///   sum Q(u_k) y_{k-1} y_k / sum Q(u_k) y_{k-1}^2.
double nonsequential_baseline(const Path& path, const KernelWindow& window);

/// Monte Carlo risk sweep.  Replication r of size n draws from the stream
/// keyed (master_seed, n, r); per-replication results land in slot r and are
/// reduced in index order with extended-precision accumulation, so the table
/// is byte-identical for any worker count.
RiskTable run_risk(const RiskExperiment& experiment);

struct RateRatio {
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    double empirical_ratio = 0.0;    // risk(n1) / risk(n2)
    double theoretical_ratio = 0.0;  // (n2/n1)^{beta/(2 beta + 1)}
};

/// Empirical risk ratios against the minimax rate phi_n = n^{beta/(2beta+1)}.
std::vector<RateRatio> rate_check(const RiskTable& table, double beta);

/// Replications of the full sequential pipeline on one model size, keeping
/// every SequentialResult; feeds zeta_diagnostics and stopping calibration.
std::vector<SequentialResult> replicate_sequential(const CoefficientFunction& coefficient,
                                                   const NoiseSpec& noise, double z0,
                                                   std::int64_t n, std::int64_t replications,
                                                   std::uint64_t master_seed,
                                                   const ProcedureParams& params,
                                                   int threads = 0);

}  // namespace seqkern
