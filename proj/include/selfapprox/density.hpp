#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "selfapprox/characters.hpp"
#include "selfapprox/diophantine.hpp"
#include "selfapprox/lfunc.hpp"
#include "selfapprox/random.hpp"
#include "selfapprox/stats.hpp"

namespace selfapprox {

/// Shifts d_1..d_m paired with characters chi_1..chi_m.
struct ShiftFamily {
  std::vector<double> shifts;
  std::vector<DirichletCharacter> characters;

  /// Throws DomainError unless m >= 2, sizes match and every shift is finite.
  void validate() const;
  [[nodiscard]] std::size_t size() const { return shifts.size(); }
  [[nodiscard]] double max_abs_shift() const;
};

/// f(sigmas, t, chi) -> values at sigma_i + i t. Used to run g over L, L_v or L_N alike.
using ColumnFunction =
    std::function<std::vector<Complex>(std::span<const double> sigmas, double t, const DirichletCharacter& chi)>;

ColumnFunction full_l(const EvaluatorConfig& cfg);
ColumnFunction truncated_l(double v);
ColumnFunction partial_sum_l(std::uint64_t N);

/// Values F(s + i d_k tau, chi_k) on the grid of `region`, one vector per shift,
/// laid out t-major (index it * grid_sigma + is).
std::vector<std::vector<Complex>> shifted_grid_values(double tau, const ShiftFamily& family,
                                                      const StripRegion& region, const ColumnFunction& f);

/// max over pairs (j, k) and grid points of |values[j] - values[k]|.
double max_pairwise_difference(const std::vector<std::vector<Complex>>& values);

/// g(tau) on the grid_sigma x grid_t grid of K. Throws RangeError past the evaluator cap.
double g_value(double tau, const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg);

/// g(tau) with F in place of L.
double g_value_with(double tau, const ShiftFamily& family, const StripRegion& region, const ColumnFunction& f);

struct GSample {
  double tau = 0.0;
  double g = 0.0;
  /// (g on the refined grid - g) / g on the refined grid; 0 when both vanish or refinement is off.
  double refine_delta = 0.0;
};

/// g(tau) and, when `refine`, the relative change on the doubled grid.
GSample g_sample(double tau, const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg,
                 bool refine = true);

/// 1 iff g(tau) < eps. Throws DomainError for eps <= 0.
int indicator(double tau, double eps, const ShiftFamily& family, const StripRegion& region,
              const EvaluatorConfig& cfg);

/// Throws RangeError unless T max|d_k| + max|t| over K stays within cfg.t_cap;
/// the message names the largest usable T.
void check_horizon(double T, const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg);
double largest_usable_horizon(const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg);

struct SamplingOptions {
  std::uint64_t n_samples = 1000;
  std::uint64_t seed = 0;
  Sampling sampling = Sampling::kUniform;
  unsigned threads = 1;
  bool refine = true;
  std::uint64_t stream = streams::kTauSamples;
};

/// tau_i in [lo, lo + width): uniform draws or stratified points (i + u0) / n.
double sample_point(std::uint64_t i, double lo, double width, const SamplingOptions& options);

/// g at n_samples points of [0, T], in sample-index order.
std::vector<GSample> sample_g(double T, const ShiftFamily& family, const StripRegion& region,
                              const EvaluatorConfig& cfg, const SamplingOptions& options);

struct DensityEstimate {
  double epsilon = 0.0;
  double horizon = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t hits = 0;
  double density = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Share of samples with g < eps. Throws DomainError for eps <= 0.
DensityEstimate density_from_samples(std::span<const GSample> samples, double eps, double T);

struct DensityRun {
  DensityEstimate estimate;
  std::vector<GSample> samples;
};

DensityRun estimate_density(double eps, double T, const ShiftFamily& family, const StripRegion& region,
                            const EvaluatorConfig& cfg, const SamplingOptions& options);

class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  EmpiricalDistribution(std::vector<double> values, double horizon);

  [[nodiscard]] const std::vector<double>& sample_values() const { return values_; }
  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  /// F_T(x) = #{g < x} / n.
  [[nodiscard]] double cdf(double x) const;
  /// Smallest sample value v with #{g <= v} >= p n (p in [0, 1]).
  [[nodiscard]] double quantile(double p) const;

 private:
  std::vector<double> values_;
  double horizon_ = 0.0;
};

EmpiricalDistribution distribution_from_samples(std::span<const GSample> samples, double T);

EmpiricalDistribution empirical_distribution(double T, const ShiftFamily& family, const StripRegion& region,
                                             const EvaluatorConfig& cfg, const SamplingOptions& options);

/// sup_x |F(x) - G(x)| over all x.
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// max over the given x of |F(x) - G(x)|.
double sup_distance_on_grid(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                            std::span<const double> xs);

/// An x-region where the pooled samples pile up: a possible jump of the limit F.
struct JumpCluster {
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;  // pooled share of samples in [lo, hi]
};

struct LadderStep {
  double T_from = 0.0;
  double T_to = 0.0;
  double sup_distance = 0.0;
  double threshold = 0.0;  // two-sample KS 95% distance
};

struct ConvergenceReport {
  std::vector<double> horizons;
  std::vector<EmpiricalDistribution> distributions;
  std::vector<double> x_grid;
  std::vector<JumpCluster> jump_clusters;
  std::vector<LadderStep> steps;
  /// Every distance exceeds its predecessor by at most its own noise threshold.
  bool nonincreasing_trend = true;
};

struct DiagnosticOptions {
  int grid_points = 50;
  /// A bin of width (q90 - q10) / 200 holding this pooled share of samples is flagged.
  double jump_mass = 0.05;
};

/// F_T for each T of the ladder (rung i uses stream kLadderBase + i) and sup distances
/// between consecutive rungs on a grid that avoids flagged jump clusters.
ConvergenceReport convergence_diagnostic(const ShiftFamily& family, const StripRegion& region,
                                         const EvaluatorConfig& cfg, std::span<const double> T_ladder,
                                         const SamplingOptions& options, const DiagnosticOptions& diag = {});

/// The same analysis on distributions already sampled.
ConvergenceReport analyze_ladder(std::vector<EmpiricalDistribution> distributions, const DiagnosticOptions& diag = {});

}  // namespace selfapprox
