#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "selfapprox/characters.hpp"

namespace selfapprox {

using Complex = std::complex<double>;

/// Controls the Hurwitz-zeta / Euler-Maclaurin route used for L(s, chi).
///
/// The direct part sums N0 = max(min_terms, ceil(shift_factor * (|Im s| + 10)))
/// terms per residue class before the Euler-Maclaurin correction of order
/// em_order. N0 is doubled until the first omitted correction term (times the
/// usual |s + em_order + 1| / (sigma + em_order + 1) factor) is below
/// target_abs_error.
struct EvaluatorConfig {
  int em_order = 24;
  double shift_factor = 1.3;
  std::uint64_t min_terms = 50;
  double target_abs_error = 1e-10;
  /// Largest supported |Im s|; evaluation beyond it throws RangeError.
  double t_cap = 5e4;

  /// Throws DomainError if the configuration is unusable.
  void validate() const;
  [[nodiscard]] std::uint64_t shift_count(double abs_t) const;
};

/// Compact rectangle K = [sigma_lo, sigma_hi] x [t_lo, t_hi] with the enclosing
/// rectangle U = K expanded by `margin` on every side.
struct StripRegion {
  double sigma_lo = 0.65;
  double sigma_hi = 0.75;
  double t_lo = -0.5;
  double t_hi = 0.5;
  double margin = 0.1;
  int grid_sigma = 5;
  int grid_t = 5;

  /// Throws DomainError unless 1/2 < sigma_lo - margin and sigma_hi + margin < 1, grids positive.
  void validate() const;

  [[nodiscard]] double u_sigma_lo() const { return sigma_lo - margin; }
  [[nodiscard]] double u_sigma_hi() const { return sigma_hi + margin; }
  [[nodiscard]] double u_t_lo() const { return t_lo - margin; }
  [[nodiscard]] double u_t_hi() const { return t_hi + margin; }
  [[nodiscard]] double max_abs_t() const;

  /// Sample abscissae on K (grid_sigma points, endpoints included).
  [[nodiscard]] std::vector<double> sigmas() const;
  [[nodiscard]] std::vector<double> ts() const;
  /// Same region sampled at doubled resolution (2n - 1 points per axis); contains the original grid.
  [[nodiscard]] StripRegion refined() const;
};

/// Evenly spaced points lo..hi inclusive; a single point is the midpoint.
std::vector<double> linspace(double lo, double hi, int count);

/// Even-index Bernoulli numbers divided by factorials, B_{2k} / (2k)!, k = 0..order/2 (+1 for the error term).
/// Computed once in exact rational arithmetic.
std::span<const double> bernoulli_over_factorial(int order);

/// Hurwitz zeta(s, a) for 0 < a <= 1, s != 1.
Complex hurwitz_zeta(Complex s, double a, const EvaluatorConfig& cfg = {});

inline Complex riemann_zeta(Complex s, const EvaluatorConfig& cfg = {}) { return hurwitz_zeta(s, 1.0, cfg); }

/// L(s, chi) for sigma > 1/2 via q^{-s} sum_a chi(a) zeta(s, a/q).
Complex l_value(Complex s, const DirichletCharacter& chi, const EvaluatorConfig& cfg = {});

/// L(sigma_i + i t, chi) for every sigma_i, sharing the oscillatory factors of the direct sum.
std::vector<Complex> l_values_column(std::span<const double> sigmas, double t, const DirichletCharacter& chi,
                                     const EvaluatorConfig& cfg = {});

/// Truncated Euler product prod_{p <= v} (1 - chi(p) p^{-s})^{-1}.
Complex l_truncated(Complex s, const DirichletCharacter& chi, double v);

/// log(L_y / L_v)(s) = sum_{v < p <= y} sum_{j >= 1} chi(p)^j / (j p^{js}), inner sum stopped once p^{-j sigma}/j < 1e-16.
Complex log_l_truncated_ratio(Complex s, const DirichletCharacter& chi, double v, double y);

/// Dirichlet polynomial sum_{n <= N} chi(n) n^{-s}.
Complex l_partial_sum(Complex s, const DirichletCharacter& chi, std::uint64_t N);

/// sum_{p > v} p^{-s} for real s > 1, from the prime zeta function P(s) = sum_k mu(k)/k log zeta(ks).
double prime_zeta_tail(double s, double v, const EvaluatorConfig& cfg = {});

}  // namespace selfapprox
