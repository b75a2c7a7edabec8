#include "seqkern/adaptive.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace seqkern {

AdaptiveGrid build_grid(std::int64_t n, double beta_low, double beta_high,
                        double lambda_factor) {
    return build_grid_kappa(n, beta_low, beta_high, lambda_factor, 0.0);
}

// kappa_n = 0 means the adaptive default 1/d_n.
AdaptiveGrid build_grid_kappa(std::int64_t n, double beta_low, double beta_high,
                              double lambda_factor, double kappa_n) {
    if (kappa_n < 0.0 || kappa_n >= 1.0)
        throw std::invalid_argument("build_grid_kappa: kappa_n in [0,1)");
    if (!(beta_low >= 1.0 && beta_low < beta_high && beta_high <= 2.0))
        throw std::invalid_argument("build_grid: need 1 <= beta_low < beta_high <= 2");
    if (!(lambda_factor > 1.0))
        throw std::invalid_argument("build_grid: lambda_factor must exceed 1");
    if (n < 3) throw std::invalid_argument("build_grid: n too small");

    AdaptiveGrid g;
    g.n = n;
    g.beta_low = beta_low;
    g.beta_high = beta_high;
    g.d_n = static_cast<double>(n) / std::log(static_cast<double>(n));
    if (!(g.d_n > 1.0)) throw std::invalid_argument("build_grid: n too small (d_n <= 1)");
    g.m = floor_index(std::log(g.d_n)) + 1;
    if (g.m < 1) throw std::invalid_argument("build_grid: n too small for a level grid");

    const auto levels = static_cast<std::size_t>(g.m) + 1;
    g.betas.resize(levels);
    g.alphas.resize(levels);
    g.h_checks.resize(levels);
    g.N_values.resize(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(g.m);
        const double beta = beta_low + t * (beta_high - beta_low);
        g.betas[k] = beta;
        g.alphas[k] = beta - 1.0;
        const double kap = kappa_n > 0.0 ? kappa_n : 1.0 / g.d_n;
        g.h_checks[k] = std::pow(kap, 1.0 / (2.0 * beta + 1.0));
        g.N_values[k] = std::pow(g.d_n, beta / (2.0 * beta + 1.0));
    }

    g.lambda_star = 4.0 * std::sqrt(2.0) *
                    std::sqrt((beta_high - beta_low) /
                              ((2.0 * beta_low + 1.0) * (2.0 * beta_high + 1.0)));
    g.lambda_check = lambda_factor * g.lambda_star;
    return g;
}

std::vector<SequentialResult> level_estimates(const Path& path, double z0,
                                              const AdaptiveGrid& grid, double eps,
                                              ThresholdGamma calibration) {
    std::vector<SequentialResult> out;
    out.reserve(grid.h_checks.size());
    for (std::size_t k = 0; k < grid.h_checks.size(); ++k) {
        try {
            const KernelWindow w = make_window_truncated(grid.n, z0, grid.h_checks[k]);
            const PilotResult pilot = compute_pilot(path, w, grid.alphas[k], eps, calibration);
            out.push_back(sequential_estimate(path, w, pilot));
        } catch (const std::exception& e) {
            throw std::domain_error("level_estimates: level " + std::to_string(k) + ": " +
                                    e.what());
        }
    }
    return out;
}

Selection select_index(std::span<const double> estimates, const AdaptiveGrid& grid) {
    if (estimates.size() != grid.betas.size())
        throw std::invalid_argument("select_index: estimates must have m+1 entries");

    Selection sel;
    sel.omegas.resize(estimates.size());
    std::int64_t chosen = 0;
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        double omega = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= k; ++j) {
            omega = std::max(omega, std::fabs(estimates[j] - estimates[k]) -
                                        grid.lambda_check / grid.N_values[j]);
        }
        sel.omegas[k] = omega;
        if (omega <= grid.lambda_check / grid.N_values[k])
            chosen = static_cast<std::int64_t>(k);
    }
    sel.k_selected = chosen;
    return sel;
}

AdaptiveResult adaptive_estimate(const Path& path, double z0, const AdaptiveGrid& grid,
                                 double eps, ThresholdGamma calibration) {
    AdaptiveResult r;
    r.per_level = level_estimates(path, z0, grid, eps, calibration);

    std::vector<double> estimates;
    estimates.reserve(r.per_level.size());
    for (const auto& lvl : r.per_level) estimates.push_back(lvl.estimate);

    Selection sel = select_index(estimates, grid);
    r.k_selected = sel.k_selected;
    r.omegas = std::move(sel.omegas);
    r.estimate = r.per_level[static_cast<std::size_t>(r.k_selected)].estimate;
    r.lambda_check = grid.lambda_check;
    return r;
}

}  // namespace seqkern
