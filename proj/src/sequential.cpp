#include "seqkern/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "seqkern/summation.hpp"

namespace seqkern {

namespace {

struct SweepOutput {
    std::int64_t tau = 0;
    bool hit = false;
    double kappa = 1.0;
    double numerator = 0.0;   // sum kappa_j Q y_{j-1} y_j up to tau
    double zeta_num = 0.0;    // sum kappa_j Q y_{j-1} xi_j up to tau
};

/// Shared sweep: scans j = nu+1..n, accumulating the in-window mass until it
/// crosses H.  Out-of-window indices contribute nothing, so the scan may end
/// at the window edge; tau = n with hit = false when H is never reached.
SweepOutput sweep(const Path& path, const KernelWindow& window, std::int64_t nu, double H,
                  bool with_numerators) {
    const std::int64_t n = path.n();
    if (!(H > 0.0)) throw std::invalid_argument("stopping sweep: H must be positive");
    if (nu >= n) throw std::invalid_argument("stopping sweep: nu must be < n");

    const bool have_noise = !path.noise.empty();
    const std::int64_t lo = std::max(nu + 1, window.k_star);
    const std::int64_t hi = std::min(n, window.k_upper);

    SweepOutput out;
    NeumaierSum mass, num, zeta;
    for (std::int64_t j = lo; j <= hi; ++j) {
        const double prev = path.values[static_cast<std::size_t>(j - 1)];
        const double w = prev * prev;
        const double before = mass.value();
        if (before + w >= H && w > 0.0) {
            out.kappa = (H - before) / w;
            out.tau = j;
            out.hit = true;
            if (with_numerators) {
                num.add(out.kappa * prev * path.values[static_cast<std::size_t>(j)]);
                if (have_noise)
                    zeta.add(out.kappa * prev * path.noise[static_cast<std::size_t>(j - 1)]);
            }
            break;
        }
        mass.add(w);
        if (with_numerators) {
            num.add(prev * path.values[static_cast<std::size_t>(j)]);
            if (have_noise) zeta.add(prev * path.noise[static_cast<std::size_t>(j - 1)]);
        }
    }
    if (!out.hit) {
        out.tau = n;
        out.kappa = 1.0;
    }
    out.numerator = num.value();
    out.zeta_num = zeta.value();
    return out;
}

}  // namespace

StoppingResult stopping_time(const Path& path, const KernelWindow& window, std::int64_t nu,
                             double H) {
    const SweepOutput s = sweep(path, window, nu, H, /*with_numerators=*/false);
    return StoppingResult{s.tau, s.hit, s.kappa};
}

SequentialResult sequential_estimate(const Path& path, const KernelWindow& window,
                                     const PilotResult& pilot) {
    SequentialResult r;
    r.pilot = pilot;
    r.window = window;
    r.H = pilot.H;

    const SweepOutput s = sweep(path, window, pilot.nu, pilot.H, /*with_numerators=*/true);
    r.tau = s.tau;
    r.hit = s.hit;
    r.kappa_corr = s.kappa;

    const bool have_noise = !path.noise.empty();
    if (s.hit) {
        r.estimate = s.numerator / pilot.H;
        r.zeta_tilde = have_noise ? s.zeta_num / std::sqrt(pilot.H)
                                  : std::numeric_limits<double>::quiet_NaN();
    } else {
        r.estimate = 0.0;  // the indicator zeroes the estimate on a miss
        r.zeta_tilde = have_noise ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double ks_distance_to_normal(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("ks_distance_to_normal: empty sample");
    std::sort(sample.begin(), sample.end());
    const double m = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double cdf = normal_cdf(sample[i]);
        const double above = static_cast<double>(i + 1) / m - cdf;
        const double below = cdf - static_cast<double>(i) / m;
        d = std::max(d, std::max(above, below));
    }
    return d;
}

ZetaSummary zeta_diagnostics(std::span<const SequentialResult> results,
                             std::span<const double> zs) {
    if (results.empty()) throw std::invalid_argument("zeta_diagnostics: empty collection");

    ZetaSummary s;
    s.total = results.size();
    NeumaierSum sq;
    std::vector<double> hit_zetas;
    for (const auto& r : results) {
        const double z = std::isnan(r.zeta_tilde) ? 0.0 : r.zeta_tilde;
        sq.add(z * z);
        if (r.hit) hit_zetas.push_back(z);
    }
    s.hits = hit_zetas.size();
    s.second_moment = sq.value() / static_cast<double>(s.total);
    if (!hit_zetas.empty()) {
        NeumaierSum hsq;
        for (double z : hit_zetas) hsq.add(z * z);
        s.second_moment_hits = hsq.value() / static_cast<double>(hit_zetas.size());
        s.ks_normal = ks_distance_to_normal(hit_zetas);
    }
    for (double z : zs) {
        std::size_t count = 0;
        for (const auto& r : results) {
            const double v = std::isnan(r.zeta_tilde) ? 0.0 : r.zeta_tilde;
            if (v >= z) ++count;
        }
        s.tail_exceed_rates[z] = static_cast<double>(count) / static_cast<double>(s.total);
    }
    return s;
}

ZetaSummary zeta_diagnostics(std::span<const SequentialResult> results) {
    static const double kDefault[] = {2.0, 2.5, 3.0};
    return zeta_diagnostics(results, kDefault);
}

}  // namespace seqkern
