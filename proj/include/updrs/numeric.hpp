#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace updrs {

/// Neumaier-compensated running sum. Summation order is the caller's
/// iteration order, so results are reproducible for a fixed order.
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      carry_ += (sum_ - t) + value;
    } else {
      carry_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_mean(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value() / static_cast<double>(values.size());
}

}  // namespace updrs
