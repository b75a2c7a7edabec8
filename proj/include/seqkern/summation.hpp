#pragma once

#include <cmath>
#include <span>

namespace seqkern {

/// Neumaier (improved Kahan-Babuska) compensated accumulator.
///
/// Used everywhere a running sum feeds a threshold comparison or a published
/// statistic, so results do not depend on how the loop was blocked.
class NeumaierSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Compensated total of a contiguous range, left to right.
inline double compensated_total(std::span<const double> xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

}  // namespace seqkern
