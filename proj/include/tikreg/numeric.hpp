#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace tikreg {

/// Neumaier compensated summation. Order-dependent only through the order
/// in which values are added, so sequential use is reproducible.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// j^(-p) - (j+1)^(-p) without cancellation for large j.
inline double forward_power_gap(double j, double p) noexcept {
  return std::pow(j, -p) * -std::expm1(-p * std::log1p(1.0 / j));
}

/// log of forward_power_gap.
inline double log_forward_power_gap(double j, double p) noexcept {
  return -p * std::log(j) + std::log(-std::expm1(-p * std::log1p(1.0 / j)));
}

}  // namespace tikreg
