#pragma once

#include <stdexcept>
#include <string>

namespace selfapprox {

/// Argument outside the mathematical domain of an operation (q = 0, a > 1, zero shift, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at the pole s = 1 of a principal L-function or of zeta.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument outside the region the evaluator supports (sigma <= 1/2, |Im s| above the cap).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Invalid run configuration: unknown key, malformed value, unresolvable character id.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace selfapprox
