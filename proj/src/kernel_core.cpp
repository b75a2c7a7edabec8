#include "seqkern/kernel_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "seqkern/summation.hpp"

namespace seqkern {

std::int64_t floor_index(double x) {
    const double r = std::nearbyint(x);
    if (std::fabs(x - r) < 1e-9) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(x));
}

namespace {

KernelWindow window_indices(std::int64_t n, double z0, double h) {
    if (n < 2) throw std::invalid_argument("make_window: n must be >= 2");
    if (!(z0 > 0.0 && z0 < 1.0)) throw std::invalid_argument("make_window: z0 in (0,1)");
    if (!(h > 0.0)) throw std::invalid_argument("make_window: h must be positive");

    KernelWindow w;
    w.z0 = z0;
    w.h = h;
    w.n = n;
    const double nd = static_cast<double>(n);
    w.k_star = floor_index(nd * z0 - nd * h) + 1;
    w.k_upper = floor_index(nd * z0 + nd * h);
    return w;
}

}  // namespace

KernelWindow make_window(std::int64_t n, double z0, double h) {
    KernelWindow w = window_indices(n, z0, h);
    if (w.k_star < 1)
        throw std::domain_error("make_window: window exits the sample at k_star = " +
                                std::to_string(w.k_star));
    if (w.k_upper > n)
        throw std::domain_error("make_window: window exits the sample at k_upper = " +
                                std::to_string(w.k_upper));
    if (w.k_star > w.k_upper)
        throw std::domain_error("make_window: empty window, k_star = " +
                                std::to_string(w.k_star) + " > k_upper = " +
                                std::to_string(w.k_upper));
    return w;
}

KernelWindow make_window_truncated(std::int64_t n, double z0, double h) {
    KernelWindow w = window_indices(n, z0, h);
    if (w.k_star < 1)
        throw std::domain_error("make_window_truncated: window exits the sample at k_star = " +
                                std::to_string(w.k_star));
    if (w.k_upper > n) {
        w.k_upper = n;
        w.right_truncated = true;
    }
    if (w.k_star > w.k_upper)
        throw std::domain_error("make_window_truncated: empty window");
    return w;
}

double bandwidth(double beta, double kappa_n) {
    if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("bandwidth: beta in (1,2)");
    if (!(kappa_n > 0.0 && kappa_n < 1.0))
        throw std::invalid_argument("bandwidth: kappa_n in (0,1)");
    return std::pow(kappa_n, 1.0 / (2.0 * beta + 1.0));
}

double kappa_nonadaptive(std::int64_t n) {
    if (n < 2) throw std::invalid_argument("kappa_nonadaptive: n >= 2");
    return 1.0 / static_cast<double>(n);
}

double kappa_adaptive(std::int64_t n) {
    if (n < 3) throw std::invalid_argument("kappa_adaptive: n >= 3");
    return std::log(static_cast<double>(n)) / static_cast<double>(n);
}

PilotSize pilot_size(const KernelWindow& window, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("pilot_size: alpha in (0,1)");
    if (window.n < 3) throw std::invalid_argument("pilot_size: n >= 3");

    PilotSize p;
    const double ln_n = std::log(static_cast<double>(window.n));
    p.eps_tilde = std::pow(window.h, alpha) / ln_n;
    p.iota = floor_index(p.eps_tilde * window.nh()) + 1;
    p.nu = window.k_star + p.iota;
    if (p.nu >= window.k_upper)
        throw std::domain_error("pilot_size: pilot consumes the whole window (nu = " +
                                std::to_string(p.nu) + " >= k_upper = " +
                                std::to_string(window.k_upper) + ")");
    return p;
}

double partial_sum_A(const Path& path, const KernelWindow& window, std::int64_t k,
                     std::int64_t m) {
    const std::int64_t n = path.n();
    if (k < 0 || m < k || m > n)
        throw std::out_of_range("partial_sum_A: need 0 <= k <= m <= n");

    const std::int64_t lo = std::max(k + 1, window.k_star);
    const std::int64_t hi = std::min(m, window.k_upper);
    NeumaierSum acc;
    for (std::int64_t j = lo; j <= hi; ++j) {
        const double y = path.values[static_cast<std::size_t>(j - 1)];
        acc.add(y * y);
    }
    return acc.value();
}

double deviation_rho(const Path& path, const KernelWindow& window,
                     const std::function<double(double)>& f, std::int64_t k,
                     std::int64_t m, double gamma_S) {
    const std::int64_t n = path.n();
    if (k < 0 || m < k || m > n)
        throw std::out_of_range("deviation_rho: need 0 <= k <= m <= n");
    if (!(gamma_S > 0.0 && gamma_S <= 1.0))
        throw std::invalid_argument("deviation_rho: gamma_S in (0,1]");

    NeumaierSum weighted, plain;
    for (std::int64_t j = k + 1; j <= m; ++j) {
        const double fj = f(window.u(j));
        if (fj == 0.0) continue;
        const double y = path.values[static_cast<std::size_t>(j - 1)];
        weighted.add(fj * y * y);
        plain.add(fj);
    }
    const double nh = window.nh();
    return weighted.value() / nh - plain.value() / (gamma_S * nh);
}

}  // namespace seqkern
