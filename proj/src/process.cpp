#include "seqkern/process.hpp"

#include <cmath>
#include <stdexcept>

#include "seqkern/summation.hpp"

namespace seqkern {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kDiffStep = 1e-6;  // finite-difference step, clamped to [0,1]

double draw_gaussian_pair(Xoshiro256PlusPlus& rng, double& spare) {
    // Box-Muller; the second variate is handed back through `spare`.
    const double u1 = rng.uniform01_open();
    const double u2 = rng.uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare = r * std::sin(a);
    return r * std::cos(a);
}

/// Central finite-difference derivative with the stencil clamped to [0,1].
double fd_derivative(const CoefficientFunction& f, double x) {
    const double lo = std::max(0.0, x - kDiffStep);
    const double hi = std::min(1.0, x + kDiffStep);
    return (f(hi) - f(lo)) / (hi - lo);
}

double double_factorial_odd(int k) {
    // (2k-1)!! = 1*3*5*...*(2k-1)
    double v = 1.0;
    for (int i = 3; i <= 2 * k - 1; i += 2) v *= i;
    return v;
}

}  // namespace

CoefficientFunction CoefficientFunction::constant(double c) {
    CoefficientFunction f;
    f.evaluator = [c](double) { return c; };
    f.declared_eps = std::max(1e-6, 1.0 - std::fabs(c));
    f.declared_L = 1.0;
    return f;
}

CoefficientFunction CoefficientFunction::signed_power(double center, double alpha) {
    CoefficientFunction f;
    f.evaluator = [center, alpha](double x) {
        const double d = x - center;
        return d * std::pow(std::fabs(d), alpha);
    };
    const double beta = 1.0 + alpha;
    const double reach = std::max(center, 1.0 - center);
    f.declared_eps = 1.0 - std::pow(reach, beta);
    f.declared_L = beta * std::pow(reach, alpha);
    f.declared_beta = beta;
    f.declared_Lstar = beta;
    return f;
}

std::string to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::gaussian_unit: return "gaussian";
        case NoiseFamily::uniform_standardized: return "uniform";
        case NoiseFamily::exponential_centered: return "exponential";
        case NoiseFamily::custom: return "custom";
    }
    return "unknown";
}

NoiseSpec NoiseSpec::gaussian() { return NoiseSpec{NoiseFamily::gaussian_unit, 1.0, {}}; }
NoiseSpec NoiseSpec::uniform() { return NoiseSpec{NoiseFamily::uniform_standardized, 1.0, {}}; }
NoiseSpec NoiseSpec::exponential() { return NoiseSpec{NoiseFamily::exponential_centered, 2.0, {}}; }

NoiseSpec NoiseSpec::custom(std::function<double(Xoshiro256PlusPlus&)> draw, double varsigma) {
    NoiseSpec s;
    s.family = NoiseFamily::custom;
    s.varsigma = varsigma;
    s.custom_draw = std::move(draw);
    return s;
}

double NoiseSampler::operator()() {
    switch (spec_->family) {
        case NoiseFamily::gaussian_unit: {
            if (have_spare_) {
                have_spare_ = false;
                return spare_;
            }
            have_spare_ = true;
            return draw_gaussian_pair(*rng_, spare_);
        }
        case NoiseFamily::uniform_standardized: {
            // sqrt(3) * U[-1,1]: variance exactly 1
            return 1.7320508075688772 * (2.0 * rng_->uniform01() - 1.0);
        }
        case NoiseFamily::exponential_centered: {
            // Exp(1) - 1: mean 0, variance 1
            return -std::log(rng_->uniform01_open()) - 1.0;
        }
        case NoiseFamily::custom:
            return spec_->custom_draw(*rng_);
    }
    throw std::logic_error("NoiseSampler: unknown family");
}

void run_recursion(std::span<const double> coeffs, double y0, NoiseSampler& draw,
                   std::span<double> values_out, std::span<double> noise_out) {
    const std::size_t n = coeffs.size();
    values_out[0] = y0;
    double y = y0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double xi = draw();
        y = coeffs[k - 1] * y + xi;
        values_out[k] = y;
        noise_out[k - 1] = xi;
    }
}

Path simulate_path(const ModelConfig& config, std::uint64_t replication) {
    if (config.n < 2) throw std::invalid_argument("simulate_path: n must be >= 2");
    if (!config.coefficient.evaluator)
        throw std::invalid_argument("simulate_path: coefficient evaluator is empty");

    const std::int64_t n = config.n;
    std::vector<double> coeffs(static_cast<std::size_t>(n));
    for (std::int64_t k = 1; k <= n; ++k) {
        const double s = config.coefficient(static_cast<double>(k) / static_cast<double>(n));
        if (!std::isfinite(s))
            throw std::runtime_error("simulate_path: coefficient non-finite at k = " +
                                     std::to_string(k));
        coeffs[static_cast<std::size_t>(k - 1)] = s;
    }

    Xoshiro256PlusPlus rng(config.seed, static_cast<std::uint64_t>(n), replication);
    NoiseSampler draw(config.noise, rng);

    Path path;
    path.config = config;
    path.values.resize(static_cast<std::size_t>(n) + 1);
    path.noise.resize(static_cast<std::size_t>(n));
    run_recursion(coeffs, config.y0, draw, path.values, path.noise);
    return path;
}

StabilityVerdict verify_stability(const CoefficientFunction& f, double eps, double L,
                                  std::size_t grid_size) {
    if (grid_size < 2) throw std::invalid_argument("verify_stability: grid_size must be >= 2");
    if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("verify_stability: eps in (0,1)");

    StabilityVerdict v;
    v.grid_size = grid_size;
    const double sup_bound = 1.0 - eps;
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(grid_size - 1);
        const double s = f(x);
        if (!std::isfinite(s) || std::fabs(s) > sup_bound) {
            v.pass = false;
            v.witness_x = x;
            v.reason = "|S(x)| exceeds 1 - eps";
            return v;
        }
        const double d = fd_derivative(f, x);
        if (!std::isfinite(d) || std::fabs(d) > L) {
            v.pass = false;
            v.witness_x = x;
            v.reason = "|S'(x)| exceeds L";
            return v;
        }
    }
    v.pass = true;
    return v;
}

double weak_holder_defect(const CoefficientFunction& f, double z0, double h,
                          std::size_t quadrature_points) {
    if (quadrature_points < 8)
        throw std::invalid_argument("weak_holder_defect: quadrature_points must be >= 8");
    if (h <= 0.0 || z0 - h < 0.0 || z0 + h > 1.0)
        throw std::domain_error("weak_holder_defect: window [z0-h, z0+h] leaves [0,1]");

    // Composite Simpson over u in [-1,1]; the interval count is forced even,
    // which keeps the rule symmetric (odd integrands integrate to zero).
    std::size_t intervals = quadrature_points - 1;
    if (intervals % 2 != 0) ++intervals;
    const double s0 = f(z0);
    const double du = 2.0 / static_cast<double>(intervals);

    NeumaierSum acc;
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double u = -1.0 + du * static_cast<double>(i);
        const double g = f(z0 + u * h) - s0;
        double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc.add(w * g);
    }
    return std::fabs(acc.value() * du / 3.0);
}

double strong_holder_constant(const CoefficientFunction& f, double z0, double alpha,
                              std::size_t grid_size) {
    if (grid_size < 2)
        throw std::invalid_argument("strong_holder_constant: grid_size must be >= 2");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("strong_holder_constant: alpha in (0,1)");

    const double d0 = fd_derivative(f, z0);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(grid_size - 1);
        if (std::fabs(x - z0) < 10.0 * kDiffStep) continue;  // 0/0 at the center
        const double ratio =
            std::fabs(fd_derivative(f, x) - d0) / std::pow(std::fabs(x - z0), alpha);
        sup = std::max(sup, ratio);
    }
    return sup;
}

std::vector<MomentCheck> verify_moment_class(const NoiseSpec& noise, double varsigma,
                                             int k_max, std::size_t sample_size,
                                             std::uint64_t seed) {
    if (k_max < 1 || k_max > 8)
        throw std::invalid_argument("verify_moment_class: k_max in [1,8]");
    if (varsigma < 1.0) throw std::invalid_argument("verify_moment_class: varsigma >= 1");
    if (sample_size < 2) throw std::invalid_argument("verify_moment_class: sample_size >= 2");

    Xoshiro256PlusPlus rng(seed, 0x6d6f6d656e74ULL, static_cast<std::uint64_t>(k_max));
    NoiseSampler draw(noise, rng);

    // One pass: accumulate |xi|^{2k} and |xi|^{4k} for each k.
    std::vector<NeumaierSum> sum(static_cast<std::size_t>(k_max));
    std::vector<NeumaierSum> sum_sq(static_cast<std::size_t>(k_max));
    for (std::size_t i = 0; i < sample_size; ++i) {
        const double a = std::fabs(draw());
        const double a2 = a * a;
        double p = 1.0;
        for (int k = 1; k <= k_max; ++k) {
            p *= a2;
            sum[static_cast<std::size_t>(k - 1)].add(p);
            sum_sq[static_cast<std::size_t>(k - 1)].add(p * p);
        }
    }

    std::vector<MomentCheck> out;
    out.reserve(static_cast<std::size_t>(k_max));
    const double m = static_cast<double>(sample_size);
    for (int k = 1; k <= k_max; ++k) {
        MomentCheck c;
        c.k = k;
        c.empirical = sum[static_cast<std::size_t>(k - 1)].value() / m;
        const double second = sum_sq[static_cast<std::size_t>(k - 1)].value() / m;
        const double var = std::max(0.0, second - c.empirical * c.empirical);
        c.std_error = std::sqrt(var / m);
        c.bound = std::pow(varsigma, k) * double_factorial_odd(k);
        c.pass = c.empirical <= c.bound + 3.0 * c.std_error;
        out.push_back(c);
    }
    return out;
}

}  // namespace seqkern
