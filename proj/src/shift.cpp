#include "selfapprox/shift.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "selfapprox/errors.hpp"

namespace selfapprox {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool checked_mul10(std::int64_t& v) {
  if (v > std::numeric_limits<std::int64_t>::max() / 10) return false;
  v *= 10;
  return true;
}

// Decimal or p/q literal to an exact rational; nullopt if it does not fit in 64 bits.
std::optional<Rational> parse_rational(std::string_view s, std::string_view original) {
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    std::int64_t p = 0;
    std::int64_t q = 0;
    const auto a = s.substr(0, slash);
    const auto b = s.substr(slash + 1);
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), p);
    auto r2 = std::from_chars(b.data(), b.data() + b.size(), q);
    if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size() || r2.ec != std::errc{} ||
        r2.ptr != b.data() + b.size() || q == 0) {
      throw ConfigError("malformed shift '" + std::string(original) + "'");
    }
    return Rational(p, q);
  }
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  std::int64_t mantissa = 0;
  int scale = 0;
  bool digits = false;
  bool fits = true;
  bool after_point = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = true;
      if (fits && checked_mul10(mantissa) && mantissa <= std::numeric_limits<std::int64_t>::max() - (c - '0')) {
        mantissa += c - '0';
        if (after_point) ++scale;
      } else {
        fits = false;
      }
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!digits) throw ConfigError("malformed shift '" + std::string(original) + "'");
  int exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    const auto e = s.substr(i + 1);
    const char* begin = e.data();
    if (!e.empty() && e.front() == '+') ++begin;
    auto r = std::from_chars(begin, e.data() + e.size(), exponent);
    if (r.ec != std::errc{} || r.ptr != e.data() + e.size()) {
      throw ConfigError("malformed shift '" + std::string(original) + "'");
    }
    i = s.size();
  }
  if (i != s.size()) throw ConfigError("malformed shift '" + std::string(original) + "'");
  if (!fits) return std::nullopt;
  scale -= exponent;
  std::int64_t num = negative ? -mantissa : mantissa;
  std::int64_t den = 1;
  for (; scale < 0; ++scale) {
    if (!checked_mul10(num)) return std::nullopt;
  }
  for (; scale > 0; --scale) {
    if (!checked_mul10(den)) return std::nullopt;
  }
  return Rational(num, den);
}

std::optional<std::int64_t> exact_sqrt(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  for (std::int64_t c = std::max<std::int64_t>(0, r - 2); c <= r + 2; ++c) {
    if (c * c == v) return c;
  }
  return std::nullopt;
}

}  // namespace

HighPrecision Shift::high_precision() const {
  if (exact) return HighPrecision(exact->numerator()) / HighPrecision(exact->denominator());
  if (radicand) {
    return sign * boost::multiprecision::sqrt(HighPrecision(radicand->numerator()) /
                                              HighPrecision(radicand->denominator()));
  }
  return HighPrecision(text);
}

Shift parse_shift(std::string_view text) {
  text = trim(text);
  Shift out;
  out.text = std::string(text);
  std::string_view body = text;
  int sign = 1;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    if (body.front() == '-') sign = -1;
    body.remove_prefix(1);
  }
  if (body.starts_with("sqrt(") && body.ends_with(")")) {
    const auto inner = body.substr(5, body.size() - 6);
    const auto r = parse_rational(inner, text);
    if (!r || r->numerator() < 0) throw ConfigError("sqrt shift needs a nonnegative rational radicand: '" + out.text + "'");
    const auto p = exact_sqrt(r->numerator());
    const auto q = exact_sqrt(r->denominator());
    if (p && q) {
      out.exact = Rational(sign * *p, *q);
    } else {
      out.radicand = *r;
      out.sign = sign;
    }
    out.value = sign * std::sqrt(boost::rational_cast<double>(*r));
    if (out.exact) out.value = boost::rational_cast<double>(*out.exact);
    return out;
  }
  out.exact = parse_rational(text, text);
  if (out.exact) {
    out.value = boost::rational_cast<double>(*out.exact);
  } else {
    try {
      out.value = std::stod(out.text);
    } catch (const std::exception&) {
      throw ConfigError("malformed shift '" + out.text + "'");
    }
  }
  return out;
}

std::vector<Shift> parse_shift_list(std::string_view comma_separated) {
  std::vector<Shift> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    auto end = comma_separated.find(',', start);
    if (end == std::string_view::npos) end = comma_separated.size();
    out.push_back(parse_shift(comma_separated.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

Shift shift_from_double(double value) {
  Shift out;
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, value);
  out.text.assign(buf, r.ptr);
  out.value = value;
  return out;
}

}  // namespace selfapprox
