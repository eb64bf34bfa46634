#include "selfapprox/lfunc.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "selfapprox/errors.hpp"
#include "selfapprox/primes.hpp"

namespace selfapprox {

namespace {

constexpr int kMaxEmOrder = 60;

std::vector<double> compute_bernoulli_over_factorial() {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  const int top = kMaxEmOrder + 2;
  std::vector<cpp_rational> b(top + 1);
  b[0] = 1;
  for (int m = 1; m <= top; ++m) {
    cpp_rational acc = 0;
    cpp_int binom = 1;  // C(m+1, j)
    for (int j = 0; j < m; ++j) {
      acc += cpp_rational(binom) * b[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    b[m] = -acc / (m + 1);
  }
  std::vector<double> out;
  cpp_int factorial = 1;
  for (int k = 0; 2 * k <= top; ++k) {
    if (k > 0) factorial *= cpp_int(2 * k - 1) * (2 * k);
    out.push_back(static_cast<double>(cpp_rational(b[2 * k] / cpp_rational(factorial))));
  }
  return out;
}

// (e^z - 1)/z without cancellation near z = 0.
Complex expm1_over(Complex z) {
  if (std::abs(z) < 1e-3) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
  return (std::exp(z) - 1.0) / z;
}

// sum_{n >= 0} (x + n)^{-s} by Euler-Maclaurin at x. With centered = true the
// leading x^{1-s}/(s-1) is replaced by (x^{1-s} - 1)/(s-1); callers use this
// only where the dropped 1/(s-1) cancels across residue classes.
Complex em_tail(Complex s, double x, int order, bool centered) {
  const auto coeff = bernoulli_over_factorial(order);
  const double lx = std::log(x);
  const Complex x_neg_s = std::exp(-s * lx);
  Complex total;
  if (centered) {
    total = -lx * expm1_over((1.0 - s) * lx);
  } else {
    total = x * x_neg_s / (s - 1.0);
  }
  total += 0.5 * x_neg_s;
  Complex rising = s;             // s (s+1) ... (s+2k-2)
  Complex power = x_neg_s / x;    // x^{-s-2k+1}
  const double inv_x2 = 1.0 / (x * x);
  for (int k = 1; 2 * k <= order; ++k) {
    total += coeff[k] * rising * power;
    rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
    power *= inv_x2;
  }
  return total;
}

// Backlund-type bound for the remainder after `order` correction terms at x.
double em_remainder(Complex s, double x, int order) {
  const auto coeff = bernoulli_over_factorial(order);
  const int k_next = order / 2 + 1;
  double rising = 1.0;
  for (int j = 0; j <= 2 * k_next - 2; ++j) rising *= std::abs(s + static_cast<double>(j));
  const double sigma_next = s.real() + 2.0 * k_next - 1.0;
  const double term = std::abs(coeff[k_next]) * rising * std::pow(x, -sigma_next);
  const double factor = std::abs(s + static_cast<double>(2 * k_next - 1)) / std::max(sigma_next, 1.0);
  return term * std::max(factor, 1.0);
}

std::uint64_t adapt_terms(std::uint64_t n0, Complex worst_s, double offset, const EvaluatorConfig& cfg) {
  std::uint64_t n = n0;
  while (em_remainder(worst_s, static_cast<double>(n) + offset, cfg.em_order) > cfg.target_abs_error) {
    if (n > (1ULL << 40U)) throw RangeError("Euler-Maclaurin correction does not reach target error");
    n *= 2;
  }
  return n;
}

void check_imaginary_part(double t, const EvaluatorConfig& cfg) {
  if (!(std::abs(t) <= cfg.t_cap)) {
    throw RangeError("|Im s| = " + std::to_string(std::abs(t)) + " exceeds evaluator cap " +
                     std::to_string(cfg.t_cap));
  }
}

}  // namespace

void EvaluatorConfig::validate() const {
  if (em_order < 2 || em_order % 2 != 0 || em_order > kMaxEmOrder) {
    throw DomainError("em_order must be even and in [2, " + std::to_string(kMaxEmOrder) + "]");
  }
  if (!(target_abs_error > 0.0)) throw DomainError("target_abs_error must be positive");
  if (!(shift_factor > 0.0)) throw DomainError("shift_factor must be positive");
  if (min_terms < 1) throw DomainError("min_terms must be positive");
  if (!(t_cap > 0.0)) throw DomainError("t_cap must be positive");
}

std::uint64_t EvaluatorConfig::shift_count(double abs_t) const {
  const auto scaled = static_cast<std::uint64_t>(std::ceil(shift_factor * (abs_t + 10.0)));
  return std::max(min_terms, scaled);
}

void StripRegion::validate() const {
  if (!(sigma_lo <= sigma_hi) || !(t_lo <= t_hi)) throw DomainError("strip region bounds are inverted");
  if (!(margin > 0.0)) throw DomainError("strip region margin must be positive");
  if (!(u_sigma_lo() > 0.5) || !(u_sigma_hi() < 1.0)) {
    throw DomainError("enclosing rectangle U must lie inside 1/2 < sigma < 1");
  }
  if (grid_sigma < 1 || grid_t < 1) throw DomainError("strip region grids must be positive");
}

double StripRegion::max_abs_t() const { return std::max(std::abs(t_lo), std::abs(t_hi)); }

std::vector<double> StripRegion::sigmas() const { return linspace(sigma_lo, sigma_hi, grid_sigma); }
std::vector<double> StripRegion::ts() const { return linspace(t_lo, t_hi, grid_t); }

StripRegion StripRegion::refined() const {
  StripRegion r = *this;
  r.grid_sigma = 2 * grid_sigma - 1;
  r.grid_t = 2 * grid_t - 1;
  return r;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {0.5 * (lo + hi)};
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(i == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return out;
}

std::span<const double> bernoulli_over_factorial(int order) {
  static const std::vector<double> table = compute_bernoulli_over_factorial();
  const auto count = static_cast<std::size_t>(std::clamp(order, 0, kMaxEmOrder) / 2 + 2);
  return {table.data(), std::min(count, table.size())};
}

Complex hurwitz_zeta(Complex s, double a, const EvaluatorConfig& cfg) {
  cfg.validate();
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("Hurwitz parameter a must lie in (0, 1]");
  if (s == Complex(1.0, 0.0)) throw PoleError("zeta(s, a) has a pole at s = 1");
  check_imaginary_part(s.imag(), cfg);
  const auto n = adapt_terms(cfg.shift_count(std::abs(s.imag())), s, a, cfg);
  Complex head;
  for (std::uint64_t k = 0; k < n; ++k) head += std::exp(-s * std::log(static_cast<double>(k) + a));
  return head + em_tail(s, static_cast<double>(n) + a, cfg.em_order, false);
}

std::vector<Complex> l_values_column(std::span<const double> sigmas, double t, const DirichletCharacter& chi,
                                     const EvaluatorConfig& cfg) {
  cfg.validate();
  check_imaginary_part(t, cfg);
  if (sigmas.empty()) return {};
  double sigma_min = sigmas.front();
  for (double sigma : sigmas) {
    if (!(sigma > 0.5)) throw RangeError("L(s, chi) is only supported for sigma > 1/2");
    if (chi.principal() && sigma == 1.0 && t == 0.0) throw PoleError("principal L(s, chi) has a pole at s = 1");
    sigma_min = std::min(sigma_min, sigma);
  }
  const std::uint64_t q = chi.modulus();
  const auto& values = chi.table();
  const double qd = static_cast<double>(q);
  const auto n = adapt_terms(cfg.shift_count(std::abs(t)), Complex(sigma_min, t), 1.0 / qd, cfg);

  const std::size_t count = sigmas.size();
  std::vector<double> re(count, 0.0);
  std::vector<double> im(count, 0.0);
  const std::uint64_t last = q * n;
  for (std::uint64_t m = 1; m <= last; ++m) {
    const Complex c = values[m % q];
    if (c.real() == 0.0 && c.imag() == 0.0) continue;
    const double lm = std::log(static_cast<double>(m));
    // c * e^{-i t log m}
    const double cs = std::cos(t * lm);
    const double sn = -std::sin(t * lm);
    const double wr = c.real() * cs - c.imag() * sn;
    const double wi = c.real() * sn + c.imag() * cs;
    for (std::size_t i = 0; i < count; ++i) {
      const double mag = std::exp(-sigmas[i] * lm);
      re[i] += mag * wr;
      im[i] += mag * wi;
    }
  }

  std::vector<Complex> out(count);
  const bool centered = !chi.principal();
  for (std::size_t i = 0; i < count; ++i) {
    const Complex s(sigmas[i], t);
    Complex tails;
    for (std::uint64_t a = 1; a <= q; ++a) {
      const Complex c = values[a % q];
      if (c.real() == 0.0 && c.imag() == 0.0) continue;
      tails += c * em_tail(s, static_cast<double>(n) + static_cast<double>(a) / qd, cfg.em_order, centered);
    }
    out[i] = Complex(re[i], im[i]) + std::exp(-s * std::log(qd)) * tails;
  }
  return out;
}

Complex l_value(Complex s, const DirichletCharacter& chi, const EvaluatorConfig& cfg) {
  const double sigma = s.real();
  return l_values_column(std::span<const double>(&sigma, 1), s.imag(), chi, cfg).front();
}

Complex l_truncated(Complex s, const DirichletCharacter& chi, double v) {
  if (!(s.real() > 0.0)) throw RangeError("truncated Euler product requires sigma > 0");
  Complex product(1.0, 0.0);
  for (const std::uint32_t p : primes_up_to(v)) {
    const Complex c = chi(p);
    if (c.real() == 0.0 && c.imag() == 0.0) continue;
    product /= 1.0 - c * std::exp(-s * std::log(static_cast<double>(p)));
  }
  return product;
}

Complex log_l_truncated_ratio(Complex s, const DirichletCharacter& chi, double v, double y) {
  if (!(s.real() > 0.5)) throw RangeError("log(L_y/L_v) requires sigma > 1/2");
  if (!(y >= v)) throw DomainError("log(L_y/L_v) requires y >= v");
  const auto upper = primes_up_to(y);
  const auto lower = primes_up_to(v);
  Complex total;
  for (std::size_t i = lower.size(); i < upper.size(); ++i) {
    const double p = upper[i];
    const Complex c = chi(upper[i]);
    if (c.real() == 0.0 && c.imag() == 0.0) continue;
    const Complex z = c * std::exp(-s * std::log(p));
    const double decay = std::pow(p, -s.real());
    Complex zj = z;
    double mag = decay;
    for (int j = 1;; ++j) {
      if (mag / j < 1e-16) break;
      total += zj / static_cast<double>(j);
      zj *= z;
      mag *= decay;
    }
  }
  return total;
}

Complex l_partial_sum(Complex s, const DirichletCharacter& chi, std::uint64_t N) {
  Complex total;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const Complex c = chi(static_cast<std::int64_t>(n));
    if (c.real() == 0.0 && c.imag() == 0.0) continue;
    total += c * std::exp(-s * std::log(static_cast<double>(n)));
  }
  return total;
}

double prime_zeta_tail(double s, double v, const EvaluatorConfig& cfg) {
  if (!(s > 1.0)) throw DomainError("prime zeta tail requires s > 1");
  double prime_zeta = 0.0;
  for (std::uint64_t k = 1;; ++k) {
    const double ks = static_cast<double>(k) * s;
    if (ks * std::log(2.0) > 42.0) break;
    int mu = 1;
    for (const auto& [p, e] : factorize(k)) {
      if (e > 1) {
        mu = 0;
        break;
      }
      mu = -mu;
    }
    if (mu == 0) continue;
    const double zeta = riemann_zeta(Complex(ks, 0.0), cfg).real();
    prime_zeta += mu * std::log1p(zeta - 1.0) / static_cast<double>(k);
  }
  double head = 0.0;
  for (const std::uint32_t p : primes_up_to(v)) head += std::pow(static_cast<double>(p), -s);
  return prime_zeta - head;
}

}  // namespace selfapprox
