#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "selfapprox/density.hpp"
#include "selfapprox/diophantine.hpp"
#include "selfapprox/lfunc.hpp"

namespace selfapprox {

/// P(tau) = sum_n a_n e^{i lambda_n tau}.
struct TrigPolynomial {
  std::vector<double> frequencies;
  std::vector<Complex> coefficients;
};

Complex trig_poly_eval(const TrigPolynomial& p, double tau);

/// L_N(s + i d tau, chi) as a trigonometric polynomial in tau (lambda_n = -d log n, a_n = chi(n) n^{-s}).
TrigPolynomial partial_sum_polynomial(Complex s, const DirichletCharacter& chi, std::uint64_t N, double d);

/// sqrt(area_integral / pi) / margin. Throws DomainError for margin <= 0 or area_integral < 0.
double max_modulus_bound(double area_integral, double margin);

/// Midpoint rule for the integral of h over U on cells x cells rectangles.
double area_integral(const StripRegion& region, int cells, const std::function<double(Complex)>& h);

struct SupCertificate {
  double area_integral = 0.0;  // largest over pairs of the integral of |f_jk|^2 over U
  double sup_bound = 0.0;      // max_modulus_bound of that integral with d = margin
};

/// Bound on g(tau) from the area integrals over U of the pairwise differences.
SupCertificate g_sup_certificate(double tau, const ShiftFamily& family, const StripRegion& region,
                                 const EvaluatorConfig& cfg, int cells = 24);

enum class Truncation { kEulerProduct, kPartialSum };

/// sum_{n > y} |chi(n)| n^{-2 sigma}.
double carlson_tail_sum(const DirichletCharacter& chi, double sigma, double y, const EvaluatorConfig& cfg = {});

/// sum over n with a prime factor > y of |chi(n)| n^{-2 sigma}: the mean square of L - L_y for the Euler product.
double carlson_euler_limit(const DirichletCharacter& chi, double sigma, double y, const EvaluatorConfig& cfg = {});

struct CarlsonResult {
  double y = 0.0;
  Truncation truncation = Truncation::kEulerProduct;
  double empirical = 0.0;
  double standard_error = 0.0;
  /// sum_{n > y} |chi(n)| / n^{2 sigma}.
  double theoretical = 0.0;
  /// Carlson limit of the mean square for the chosen truncation.
  double limit = 0.0;
  std::uint64_t samples = 0;
};

/// (1/T) int_0^T |L(s + i x tau) - L_y(s + i x tau)|^2 d tau by Monte Carlo, for every y on
/// one shared tau sample. Throws DomainError unless 1/2 < sigma < 1 and x != 0; RangeError past the cap.
std::vector<CarlsonResult> carlson_mean_values(const DirichletCharacter& chi, Complex s, std::span<const double> ys,
                                               double x, double T, const SamplingOptions& options,
                                               Truncation truncation = Truncation::kEulerProduct,
                                               const EvaluatorConfig& cfg = {});

CarlsonResult carlson_mean_value(const DirichletCharacter& chi, Complex s, double y, double x, double T,
                                 const SamplingOptions& options, Truncation truncation = Truncation::kEulerProduct,
                                 const EvaluatorConfig& cfg = {});

struct TailCheckReport {
  double v = 0.0;
  double y = 0.0;
  double sigma1 = 0.0;
  double meas_R = 0.0;
  double prime_tail = 0.0;  // sum_{p > v} p^{-2 sigma_1}
  /// (1/T) int_{S_T} int_U sum_k |log(L_y / L_v)(s + i d_k tau)|^2.
  double empirical = 0.0;
  double standard_error = 0.0;
  /// meas R * prime_tail.
  double bound = 0.0;
  /// empirical / bound: the implied constant.
  double ratio = 0.0;
  /// m meas R int_U sum_{v < p <= y} -log(1 - |chi(p)| p^{-2 sigma}), the large-T value.
  double predicted = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  std::string warning;
};

/// Samples tau uniformly on [0, T]; those in the target's Kronecker set contribute the area
/// integral over U. `shifts` are all d_1..d_m, the target holds the independent ones.
TailCheckReport truncation_tail_check(const DirichletCharacter& chi, std::span<const double> shifts,
                                      const KroneckerTarget& target, const StripRegion& region, double y, double T,
                                      const SamplingOptions& options, int cells = 6);

struct B2Entry {
  std::uint64_t N = 0;
  /// (1/2T) int_{-T}^{T} |f - f_N|^2.
  double distance = 0.0;
  double standard_error = 0.0;
  /// Mean of 2 a^2 + 2 b^2 with a, b the sup over K of |L - L_N| at the two shifts.
  double decomposed_bound = 0.0;
  std::uint64_t triangle_violations = 0;
  std::uint64_t decomposition_violations = 0;
};

struct B2Report {
  double horizon = 0.0;
  std::size_t first = 0;
  std::size_t second = 1;
  std::uint64_t samples = 0;
  std::vector<B2Entry> ladder;
  bool decreasing = true;
};

/// f(tau) = max_K |L(s + i d_j tau, chi_j) - L(s + i d_k tau, chi_k)| against f_N built from
/// partial sums L_N, for each N of the ladder on one shared tau sample from [-T, T].
B2Report b2_distance(const ShiftFamily& family, std::span<const std::uint64_t> N_ladder, double T,
                     const StripRegion& region, const EvaluatorConfig& cfg, const SamplingOptions& options,
                     std::size_t first = 0, std::size_t second = 1);

}  // namespace selfapprox
