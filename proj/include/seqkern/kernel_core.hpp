#pragma once

#include <cstdint>
#include <functional>

#include "seqkern/process.hpp"

namespace seqkern {

/// Indicator kernel Q = 1_{[-1,1]}; the only kernel used by the estimators.
inline double indicator_kernel(double u) { return (u >= -1.0 && u <= 1.0) ? 1.0 : 0.0; }

/// Mathematical floor with an integer-snap guard: upstream products such as
/// n*z0 - n*h can land one ulp below an exact integer, and the window index
/// formulas are defined through the integral part of the intended real value.
std::int64_t floor_index(double x);

/// The estimation window around z0 at bandwidth h:
///   k_star  = floor(n z0 - n h) + 1,   k_upper = floor(n z0 + n h).
/// Window membership everywhere in this library is by index range
/// [k_star, k_upper]; the closed indicator Q agrees with it except on
/// measure-zero boundary ties.
struct KernelWindow {
    double z0 = 0.0;
    double h = 0.0;
    std::int64_t n = 0;
    std::int64_t k_star = 0;
    std::int64_t k_upper = 0;
    bool right_truncated = false;  // k_upper clamped to n

    double u(std::int64_t j) const {
        return (static_cast<double>(j) / static_cast<double>(n) - z0) / h;
    }
    bool contains(std::int64_t j) const { return j >= k_star && j <= k_upper; }
    std::int64_t size() const { return k_upper - k_star + 1; }
    double nh() const { return static_cast<double>(n) * h; }
};

/// Strict construction: the window must sit inside [1, n]; a window touching
/// the sample boundary is rejected rather than clipped, since clipping would
/// silently change the estimator's normalization.
KernelWindow make_window(std::int64_t n, double z0, double h);

/// Construction that allows the right edge to overrun the sample: k_upper is
/// clamped to n and the window marked truncated.  The adaptive grid needs
/// this at small n, where the largest-bandwidth levels stick out past x = 1;
/// all sums stop at n anyway, so the procedure stays well defined (levels
/// that cannot collect the threshold mass simply miss).
KernelWindow make_window_truncated(std::int64_t n, double z0, double h);

/// h(beta) = kappa_n^{1/(2 beta + 1)}.
double bandwidth(double beta, double kappa_n);

/// kappa_n for the two regimes the theory uses.
double kappa_nonadaptive(std::int64_t n);  // 1/n
double kappa_adaptive(std::int64_t n);     // ln n / n

struct PilotSize {
    std::int64_t nu = 0;      // k_star + iota
    std::int64_t iota = 0;    // floor(eps_tilde n h) + 1
    double eps_tilde = 0.0;   // h^alpha / ln n
};

/// Size of the pilot segment at the left edge of the window.
PilotSize pilot_size(const KernelWindow& window, double alpha);

/// A_{k,m} = sum_{j=k+1}^{m} Q(u_j) y_{j-1}^2 (compensated).
double partial_sum_A(const Path& path, const KernelWindow& window, std::int64_t k,
                     std::int64_t m);

/// Centered deviation statistic
///   rho_{k,m}(f) = (nh)^{-1} sum f(u_j) y_{j-1}^2 - (gamma nh)^{-1} sum f(u_j),
/// a concentration diagnostic; f carries its own support (pass Q for the
/// plain window count).
double deviation_rho(const Path& path, const KernelWindow& window,
                     const std::function<double(double)>& f, std::int64_t k,
                     std::int64_t m, double gamma_S);

}  // namespace seqkern
