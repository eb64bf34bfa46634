#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

namespace selfapprox {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t hits, std::uint64_t n, double z = kZ95) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Half-width of the Wilson interval divided by z: a standard-error scale for the proportion.
inline double wilson_standard_error(std::uint64_t hits, std::uint64_t n) {
  const auto ci = wilson_interval(hits, n);
  return (ci.hi - ci.lo) / (2.0 * kZ95);
}

/// Two-sample Kolmogorov-Smirnov critical distance at the 95% level.
inline double ks_threshold_95(std::size_t n1, std::size_t n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return 1.358 * std::sqrt((a + b) / (a * b));
}

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Sample mean and its standard error, accumulated in index order.
inline MeanEstimate mean_with_error(std::span<const double> values) {
  MeanEstimate out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  out.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

}  // namespace selfapprox
