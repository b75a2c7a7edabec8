#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqkern/rng.hpp"

namespace seqkern {

/// The unknown autoregression coefficient S: [0,1] -> R, together with the
/// class parameters its author claims for it.  Claims are metadata only;
/// membership is checked numerically by the verifier operations below.
struct CoefficientFunction {
    std::function<double(double)> evaluator;
    double declared_eps = 0.1;
    double declared_L = 1.0;
    std::optional<double> declared_beta;
    std::optional<double> declared_Lstar;

    double operator()(double x) const { return evaluator(x); }

    static CoefficientFunction constant(double c);
    /// S(x) = (x - center)|x - center|^alpha, the standard smooth test
    /// function with a vanishing symmetric local integral at `center`.
    static CoefficientFunction signed_power(double center, double alpha);
};

enum class NoiseFamily { gaussian_unit, uniform_standardized, exponential_centered, custom };

std::string to_string(NoiseFamily family);

/// An i.i.d. noise law with mean 0 and variance 1.
///   gaussian_unit         N(0,1)
///   uniform_standardized  sqrt(3) * U[-1,1]
///   exponential_centered  Exp(1) - 1
/// `varsigma` is the moment-class parameter carried as metadata and used by
/// verify_moment_class.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::gaussian_unit;
    double varsigma = 2.0;
    std::function<double(Xoshiro256PlusPlus&)> custom_draw;

    static NoiseSpec gaussian();
    static NoiseSpec uniform();
    static NoiseSpec exponential();
    static NoiseSpec custom(std::function<double(Xoshiro256PlusPlus&)> draw,
                            double varsigma = 2.0);
};

/// Draws variates from a NoiseSpec.  One sampler per path; the Box-Muller
/// spare is cached here so a sampler is deterministic given its engine.
class NoiseSampler {
  public:
    NoiseSampler(const NoiseSpec& spec, Xoshiro256PlusPlus& rng)
        : spec_(&spec), rng_(&rng) {}

    double operator()();

  private:
    const NoiseSpec* spec_;
    Xoshiro256PlusPlus* rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct ModelConfig {
    std::int64_t n = 0;
    double y0 = 0.0;  // initial state; 0 sits inside every stationarity basin
    CoefficientFunction coefficient;
    NoiseSpec noise;
    std::uint64_t seed = 0;
};

/// One simulated trajectory (y_0, ..., y_n).  `noise` holds the realized
/// xi_1..xi_n when the path came from the simulator (simulation mode);
/// it is empty for externally supplied observations.
struct Path {
    std::vector<double> values;
    std::vector<double> noise;
    ModelConfig config;

    std::int64_t n() const { return static_cast<std::int64_t>(values.size()) - 1; }
};

/// Simulate y_k = S(k/n) y_{k-1} + xi_k, k = 1..n.
///
/// The RNG stream is keyed by (config.seed, config.n, replication), so a
/// Monte Carlo layer gets collision-free per-replication streams and a plain
/// call (replication 0) is reproducible bit-for-bit.
Path simulate_path(const ModelConfig& config, std::uint64_t replication = 0);

/// Recursion core shared by simulate_path and the Monte Carlo harness:
/// coefficient values are precomputed once per n there.  Both callers run
/// the identical arithmetic, which is what keeps paths bit-identical.
void run_recursion(std::span<const double> coeffs, double y0, NoiseSampler& draw,
                   std::span<double> values_out, std::span<double> noise_out);

struct StabilityVerdict {
    bool pass = false;
    double witness_x = 0.0;   // a violating point when pass == false
    std::string reason;
    std::size_t grid_size = 0;
};

/// Grid certificate for membership in the stability set:
/// sup|S| <= 1 - eps and |S'| <= L (central finite differences).
StabilityVerdict verify_stability(const CoefficientFunction& f, double eps, double L,
                                  std::size_t grid_size);

/// |Omega_h(z0, S)| = |int_{-1}^{1} (S(z0 + u h) - S(z0)) du| by composite
/// Simpson.  The caller compares the defect against eps_n* h^beta.
double weak_holder_defect(const CoefficientFunction& f, double z0, double h,
                          std::size_t quadrature_points);

/// Grid supremum of |S'(x) - S'(z0)| / |x - z0|^alpha, the strong local
/// Holder constant Omega*(z0, S), with finite-difference derivatives.
double strong_holder_constant(const CoefficientFunction& f, double z0, double alpha,
                              std::size_t grid_size);

struct MomentCheck {
    int k = 0;
    double empirical = 0.0;
    double bound = 0.0;      // varsigma^k (2k-1)!!
    double std_error = 0.0;
    bool pass = false;       // empirical <= bound + 3 std errors
};

/// Monte Carlo check of E|xi|^{2k} <= varsigma^k (2k-1)!! for k = 1..k_max.
std::vector<MomentCheck> verify_moment_class(const NoiseSpec& noise, double varsigma,
                                             int k_max, std::size_t sample_size,
                                             std::uint64_t seed = 0x5eed);

}  // namespace seqkern
