#include "seqkern/pilot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqkern/summation.hpp"

namespace seqkern {

double gamma_of(double s) {
    if (!(std::fabs(s) < 1.0)) throw std::domain_error("gamma_of: |s| must be < 1");
    return 1.0 - s * s;
}

double project_estimate(double s_hat, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("project_estimate: eps in (0,1)");
    return std::min(std::max(s_hat, -1.0 + eps), 1.0 - eps);
}

PilotEstimate pilot_estimate(const Path& path, const KernelWindow& window, std::int64_t nu) {
    if (nu <= window.k_star || nu >= window.k_upper)
        throw std::invalid_argument("pilot_estimate: nu must lie inside (k_star, k_upper)");

    NeumaierSum num, den;
    for (std::int64_t j = window.k_star; j <= nu; ++j) {
        const double prev = path.values[static_cast<std::size_t>(j - 1)];
        const double cur = path.values[static_cast<std::size_t>(j)];
        num.add(prev * cur);
        den.add(prev * prev);
    }
    PilotEstimate e;
    e.a_nu = den.value();
    if (e.a_nu == 0.0) throw degenerate_pilot_error("pilot_estimate: A_nu = 0");
    e.s_hat = num.value() / e.a_nu;
    return e;
}

Threshold threshold_H(double s_tilde, double eps_tilde, std::int64_t n, double h) {
    if (!(eps_tilde >= 0.0 && eps_tilde < 1.0))
        throw std::invalid_argument("threshold_H: eps_tilde in [0,1)");
    Threshold t;
    t.phi = 2.0 * (1.0 - eps_tilde) / gamma_of(s_tilde);
    t.H = t.phi * static_cast<double>(n) * h;
    return t;
}

PilotResult compute_pilot(const Path& path, const KernelWindow& window, double alpha,
                          double eps, ThresholdGamma calibration) {
    const PilotSize size = pilot_size(window, alpha);

    PilotResult r;
    r.nu = size.nu;
    r.iota = size.iota;
    r.eps_tilde = size.eps_tilde;
    r.eps = eps;
    try {
        const PilotEstimate e = pilot_estimate(path, window, size.nu);
        r.s_hat = e.s_hat;
        r.a_nu = e.a_nu;
        r.s_tilde = project_estimate(e.s_hat, eps);
    } catch (const degenerate_pilot_error&) {
        r.degenerate = true;
        r.s_hat = std::numeric_limits<double>::quiet_NaN();
        r.a_nu = 0.0;
        r.s_tilde = 0.0;
    }
    if (calibration == ThresholdGamma::fixed_center) r.s_tilde = 0.0;
    const Threshold t = threshold_H(r.s_tilde, r.eps_tilde, window.n, window.h);
    r.H = t.H;
    r.phi = t.phi;
    return r;
}

}  // namespace seqkern
