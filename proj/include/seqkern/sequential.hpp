#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "seqkern/pilot.hpp"

namespace seqkern {

struct StoppingResult {
    std::int64_t tau = 0;       // first k >= nu+1 with A_{nu,k} >= H; n if never
    bool hit = false;
    double kappa_corr = 1.0;    // fractional weight on the crossing term; 1 on miss
};

/// tau_H = inf{ k >= nu+1 : A_{nu,k} >= H }, with inf over the empty set read
/// as n (hit = false).  On a hit the correcting coefficient solves
///   A_{nu,tau-1} + kappa Q(u_tau) y_{tau-1}^2 = H.
StoppingResult stopping_time(const Path& path, const KernelWindow& window, std::int64_t nu,
                             double H);

/// The truncated sequential estimate and everything observed along the sweep.
struct SequentialResult {
    double estimate = 0.0;      // S*_h; 0 on miss
    std::int64_t tau = 0;
    double kappa_corr = 1.0;
    double H = 0.0;
    bool hit = false;
    PilotResult pilot;
    KernelWindow window;
    /// H^{-1/2} sum_{j=nu+1}^{tau} kappa_j Q(u_j) y_{j-1} xi_j on a hit,
    /// 0 on a miss; NaN when the path carries no realized noise.
    double zeta_tilde = 0.0;
};

/// One pass over j = nu+1..n accumulates the stopped mass, the estimate
/// numerator and the noise martingale together, so the reconstructed mass
/// equals H exactly on every hit.
SequentialResult sequential_estimate(const Path& path, const KernelWindow& window,
                                     const PilotResult& pilot);

struct ZetaSummary {
    double second_moment = 0.0;        // mean zeta^2, misses contributing 0
    double second_moment_hits = 0.0;   // mean zeta^2 over hits only
    std::map<double, double> tail_exceed_rates;  // z -> P(zeta >= z)
    double ks_normal = 0.0;            // KS distance of the hit sample to N(0,1)
    std::size_t hits = 0;
    std::size_t total = 0;
};

/// Empirical diagnostics for the normalized residual martingale: second
/// moment (theory bound 1), one-sided tail exceedance versus 2 exp(-z^2/8),
/// and Kolmogorov-Smirnov distance to the standard normal.  The KS statistic
/// is taken over hits: misses put an atom at zero that measures the miss
/// rate, not the limit law.
ZetaSummary zeta_diagnostics(std::span<const SequentialResult> results,
                             std::span<const double> zs);
ZetaSummary zeta_diagnostics(std::span<const SequentialResult> results);

/// Phi(x), the standard normal CDF.
double normal_cdf(double x);

/// sup_x |F_hat(x) - Phi(x)| for a sample (sorted internally).
double ks_distance_to_normal(std::vector<double> sample);

}  // namespace seqkern
