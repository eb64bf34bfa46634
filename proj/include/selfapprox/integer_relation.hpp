#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "selfapprox/shift.hpp"

namespace selfapprox {

struct PslqOptions {
  /// Largest admissible |coefficient|; the search stops once PSLQ proves no
  /// relation of Euclidean norm <= coeff_cap exists.
  std::int64_t coeff_cap = 1'000'000;
  /// A relation c is accepted when |sum c_i x_i| <= residual_tolerance.
  double residual_tolerance = 1e-30;
  int max_iterations = 100'000;
};

struct PslqResult {
  std::optional<std::vector<std::int64_t>> relation;
  HighPrecision residual = 0;
  /// Lower bound on the norm of any integer relation among the inputs, valid at the working precision.
  HighPrecision norm_bound = 0;
  bool precision_exhausted = false;
  int iterations = 0;
};

/// Ferguson-Bailey PSLQ over ~100-digit floats. Inputs must be nonzero vectors.
PslqResult pslq(const std::vector<HighPrecision>& x, const PslqOptions& options);

/// Rounds to `digits` significant decimal digits.
HighPrecision round_to_digits(const HighPrecision& v, int digits);

}  // namespace selfapprox
