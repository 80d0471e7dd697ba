#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ldlab/parallel.hpp"

namespace ldlab {

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Two-sided Wilson score interval for k successes in n trials.
inline Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// One-sided 95% Wilson upper bound.
inline double wilson_upper(std::size_t k, std::size_t n) {
  return wilson_interval(k, n, 1.6448536269514722).hi;
}

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

/// Mean and standard error using pairwise sums (order-fixed, thread-count independent).
inline MeanEstimate mean_and_stderr(const std::vector<double>& x) {
  MeanEstimate r;
  r.count = x.size();
  if (x.empty()) return r;
  const double n = static_cast<double>(x.size());
  r.mean = pairwise_sum(x) / n;
  if (x.size() < 2) return r;
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - r.mean) * (x[i] - r.mean);
  const double var = pairwise_sum(sq) / (n - 1.0);
  r.stderr_ = std::sqrt(var / n);
  return r;
}

}  // namespace ldlab
