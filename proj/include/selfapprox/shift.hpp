#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace selfapprox {

using HighPrecision = boost::multiprecision::cpp_bin_float_100;
using Rational = boost::rational<std::int64_t>;

/// A shift parameter d as written by the user: an integer, a decimal, "p/q",
/// or "sqrt(r)" with rational r, each optionally signed. Rational spellings
/// keep their exact value; every spelling can be re-evaluated to ~100 digits.
struct Shift {
  std::string text;
  std::optional<Rational> exact;
  std::optional<Rational> radicand;  // set for sqrt(r) with r not a rational square
  int sign = 1;
  double value = 0.0;

  [[nodiscard]] HighPrecision high_precision() const;
};

/// Throws ConfigError on malformed input.
Shift parse_shift(std::string_view text);
std::vector<Shift> parse_shift_list(std::string_view comma_separated);
Shift shift_from_double(double value);

}  // namespace selfapprox
