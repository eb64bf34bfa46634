#include "selfapprox/density.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selfapprox/errors.hpp"
#include "selfapprox/parallel.hpp"

namespace selfapprox {

void ShiftFamily::validate() const {
  if (shifts.size() < 2) throw DomainError("a shift family needs at least two shifts");
  if (characters.size() != shifts.size()) {
    throw DomainError("shift family has " + std::to_string(shifts.size()) + " shifts but " +
                      std::to_string(characters.size()) + " characters");
  }
  for (double d : shifts)
    if (!std::isfinite(d)) throw DomainError("shifts must be finite");
}

double ShiftFamily::max_abs_shift() const {
  double m = 0.0;
  for (double d : shifts) m = std::max(m, std::abs(d));
  return m;
}

ColumnFunction full_l(const EvaluatorConfig& cfg) {
  return [cfg](std::span<const double> sigmas, double t, const DirichletCharacter& chi) {
    return l_values_column(sigmas, t, chi, cfg);
  };
}

ColumnFunction truncated_l(double v) {
  return [v](std::span<const double> sigmas, double t, const DirichletCharacter& chi) {
    std::vector<Complex> out;
    out.reserve(sigmas.size());
    for (double sigma : sigmas) out.push_back(l_truncated({sigma, t}, chi, v));
    return out;
  };
}

ColumnFunction partial_sum_l(std::uint64_t N) {
  return [N](std::span<const double> sigmas, double t, const DirichletCharacter& chi) {
    std::vector<Complex> out;
    out.reserve(sigmas.size());
    for (double sigma : sigmas) out.push_back(l_partial_sum({sigma, t}, chi, N));
    return out;
  };
}

std::vector<std::vector<Complex>> shifted_grid_values(double tau, const ShiftFamily& family,
                                                      const StripRegion& region, const ColumnFunction& f) {
  const auto sigmas = region.sigmas();
  const auto ts = region.ts();
  std::vector<std::vector<Complex>> values(family.size());
  for (std::size_t k = 0; k < family.size(); ++k) {
    // Identical (d, chi) pairs share one evaluation.
    bool reused = false;
    for (std::size_t j = 0; j < k && !reused; ++j) {
      if (family.shifts[j] == family.shifts[k] && family.characters[j] == family.characters[k]) {
        values[k] = values[j];
        reused = true;
      }
    }
    if (reused) continue;
    values[k].reserve(sigmas.size() * ts.size());
    for (double t : ts) {
      const auto column = f(sigmas, t + family.shifts[k] * tau, family.characters[k]);
      values[k].insert(values[k].end(), column.begin(), column.end());
    }
  }
  return values;
}

double max_pairwise_difference(const std::vector<std::vector<Complex>>& values) {
  double g = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j)
    for (std::size_t k = j + 1; k < values.size(); ++k)
      for (std::size_t i = 0; i < values[j].size(); ++i) g = std::max(g, std::abs(values[j][i] - values[k][i]));
  return g;
}

double g_value_with(double tau, const ShiftFamily& family, const StripRegion& region, const ColumnFunction& f) {
  family.validate();
  region.validate();
  return max_pairwise_difference(shifted_grid_values(tau, family, region, f));
}

double g_value(double tau, const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg) {
  return g_value_with(tau, family, region, full_l(cfg));
}

GSample g_sample(double tau, const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg,
                 bool refine) {
  GSample out{tau, 0.0, 0.0};
  if (!refine) {
    out.g = g_value(tau, family, region, cfg);
    return out;
  }
  family.validate();
  region.validate();
  // The refined grid contains the original one at even indices.
  const StripRegion fine = region.refined();
  const auto values = shifted_grid_values(tau, family, fine, full_l(cfg));
  const auto gs = static_cast<std::size_t>(fine.grid_sigma);
  const auto gt = static_cast<std::size_t>(fine.grid_t);
  const std::size_t step_s = region.grid_sigma > 1 ? 2 : 1;
  const std::size_t step_t = region.grid_t > 1 ? 2 : 1;
  double coarse = 0.0;
  double all = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    for (std::size_t k = j + 1; k < values.size(); ++k) {
      for (std::size_t it = 0; it < gt; ++it) {
        for (std::size_t is = 0; is < gs; ++is) {
          const std::size_t i = it * gs + is;
          const double diff = std::abs(values[j][i] - values[k][i]);
          all = std::max(all, diff);
          if (it % step_t == 0 && is % step_s == 0) coarse = std::max(coarse, diff);
        }
      }
    }
  }
  out.g = coarse;
  out.refine_delta = all > 0.0 ? (all - coarse) / all : 0.0;
  return out;
}

int indicator(double tau, double eps, const ShiftFamily& family, const StripRegion& region,
              const EvaluatorConfig& cfg) {
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  return g_value(tau, family, region, cfg) < eps ? 1 : 0;
}

double largest_usable_horizon(const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg) {
  const double room = cfg.t_cap - region.max_abs_t();
  const double d = family.max_abs_shift();
  if (room < 0.0) return 0.0;
  return d > 0.0 ? room / d : std::numeric_limits<double>::infinity();
}

void check_horizon(double T, const ShiftFamily& family, const StripRegion& region, const EvaluatorConfig& cfg) {
  if (!(T > 0.0)) throw DomainError("horizon T must be positive");
  if (T * family.max_abs_shift() + region.max_abs_t() > cfg.t_cap) {
    std::ostringstream msg;
    msg << "T * max|d| + max|t| exceeds the evaluator cap " << cfg.t_cap << "; largest usable T is "
        << largest_usable_horizon(family, region, cfg);
    throw RangeError(msg.str());
  }
}

double sample_point(std::uint64_t i, double lo, double width, const SamplingOptions& options) {
  const double u = options.sampling == Sampling::kUniform
                       ? random_uniform(options.seed, options.stream, i)
                       : (static_cast<double>(i) + random_uniform(options.seed, streams::kStratifiedOffset,
                                                                  options.stream)) /
                             static_cast<double>(options.n_samples);
  return lo + width * u;
}

std::vector<GSample> sample_g(double T, const ShiftFamily& family, const StripRegion& region,
                              const EvaluatorConfig& cfg, const SamplingOptions& options) {
  family.validate();
  region.validate();
  cfg.validate();
  check_horizon(T, family, region, cfg);
  if (options.n_samples < 1) throw DomainError("n_samples must be positive");
  std::vector<GSample> out(options.n_samples);
  parallel_for(options.n_samples, options.threads, [&](std::size_t i) {
    out[i] = g_sample(sample_point(i, 0.0, T, options), family, region, cfg, options.refine);
  });
  return out;
}

DensityEstimate density_from_samples(std::span<const GSample> samples, double eps, double T) {
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  DensityEstimate out;
  out.epsilon = eps;
  out.horizon = T;
  out.n_samples = samples.size();
  for (const auto& s : samples)
    if (s.g < eps) ++out.hits;
  out.density = out.n_samples ? static_cast<double>(out.hits) / static_cast<double>(out.n_samples) : 0.0;
  const auto ci = wilson_interval(out.hits, out.n_samples);
  out.ci_lo = std::min(ci.lo, out.density);
  out.ci_hi = std::max(ci.hi, out.density);
  return out;
}

DensityRun estimate_density(double eps, double T, const ShiftFamily& family, const StripRegion& region,
                            const EvaluatorConfig& cfg, const SamplingOptions& options) {
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  DensityRun run;
  run.samples = sample_g(T, family, region, cfg, options);
  run.estimate = density_from_samples(run.samples, eps, T);
  return run;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values, double horizon)
    : values_(std::move(values)), horizon_(horizon) {
  std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const {
  if (values_.empty()) return 0.0;
  const auto below = std::lower_bound(values_.begin(), values_.end(), x) - values_.begin();
  return static_cast<double>(below) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  if (values_.empty()) throw DomainError("quantile of an empty distribution");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double n = static_cast<double>(values_.size());
  auto k = static_cast<std::size_t>(std::ceil(p * n));
  k = std::clamp<std::size_t>(k, 1, values_.size());
  return values_[k - 1];
}

EmpiricalDistribution distribution_from_samples(std::span<const GSample> samples, double T) {
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(s.g);
  return {std::move(values), T};
}

EmpiricalDistribution empirical_distribution(double T, const ShiftFamily& family, const StripRegion& region,
                                             const EvaluatorConfig& cfg, const SamplingOptions& options) {
  return distribution_from_samples(sample_g(T, family, region, cfg, options), T);
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  // F jumps only at sample values; F(x) = #{< x}, so check just above every sample value too.
  double d = 0.0;
  for (const auto* dist : {&a, &b}) {
    for (double x : dist->sample_values()) {
      d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
      const double above = std::nextafter(x, std::numeric_limits<double>::infinity());
      d = std::max(d, std::abs(a.cdf(above) - b.cdf(above)));
    }
  }
  return d;
}

double sup_distance_on_grid(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                            std::span<const double> xs) {
  double d = 0.0;
  for (double x : xs) d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
  return d;
}

namespace {

std::vector<JumpCluster> find_jump_clusters(const std::vector<double>& pooled, double width, double jump_mass) {
  std::vector<JumpCluster> clusters;
  const double n = static_cast<double>(pooled.size());
  auto add = [&](double lo, double hi) {
    if (!clusters.empty() && lo <= clusters.back().hi) {
      clusters.back().hi = std::max(clusters.back().hi, hi);
    } else {
      clusters.push_back({lo, hi, 0.0});
    }
  };
  std::size_t end = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const double tol = std::max(width, 1e-12 * std::max(1.0, std::abs(pooled[i])));
    end = std::max(end, i);
    while (end < pooled.size() && pooled[end] <= pooled[i] + tol) ++end;
    if (static_cast<double>(end - i) / n >= jump_mass) add(pooled[i], pooled[end - 1]);
  }
  for (auto& c : clusters) {
    const auto lo = std::lower_bound(pooled.begin(), pooled.end(), c.lo);
    const auto hi = std::upper_bound(pooled.begin(), pooled.end(), c.hi);
    c.mass = static_cast<double>(hi - lo) / n;
  }
  return clusters;
}

}  // namespace

ConvergenceReport analyze_ladder(std::vector<EmpiricalDistribution> distributions, const DiagnosticOptions& diag) {
  ConvergenceReport report;
  for (const auto& d : distributions) report.horizons.push_back(d.horizon());
  report.distributions = std::move(distributions);
  std::vector<double> pooled;
  for (const auto& d : report.distributions)
    pooled.insert(pooled.end(), d.sample_values().begin(), d.sample_values().end());
  std::sort(pooled.begin(), pooled.end());
  if (pooled.empty()) return report;

  const EmpiricalDistribution all(pooled, 0.0);
  const double width = (all.quantile(0.9) - all.quantile(0.1)) / 200.0;
  report.jump_clusters = find_jump_clusters(pooled, width, diag.jump_mass);

  const double pad = std::max(width, 1e-6);
  std::vector<double> candidates;
  for (int k = 0; k < diag.grid_points; ++k)
    candidates.push_back(all.quantile((k + 0.5) / static_cast<double>(diag.grid_points)));
  for (const auto& c : report.jump_clusters) {
    candidates.push_back(c.lo - pad);
    candidates.push_back(c.hi + pad);
  }
  for (double x : candidates) {
    bool inside = false;
    for (const auto& c : report.jump_clusters) inside = inside || (x >= c.lo - pad / 2 && x <= c.hi + pad / 2);
    if (!inside) report.x_grid.push_back(x);
  }
  std::sort(report.x_grid.begin(), report.x_grid.end());
  report.x_grid.erase(std::unique(report.x_grid.begin(), report.x_grid.end()), report.x_grid.end());

  for (std::size_t i = 1; i < report.distributions.size(); ++i) {
    const auto& a = report.distributions[i - 1];
    const auto& b = report.distributions[i];
    report.steps.push_back({a.horizon(), b.horizon(), sup_distance_on_grid(a, b, report.x_grid),
                            ks_threshold_95(a.size(), b.size())});
  }
  for (std::size_t i = 1; i < report.steps.size(); ++i) {
    if (report.steps[i].sup_distance > report.steps[i - 1].sup_distance + report.steps[i].threshold)
      report.nonincreasing_trend = false;
  }
  return report;
}

ConvergenceReport convergence_diagnostic(const ShiftFamily& family, const StripRegion& region,
                                         const EvaluatorConfig& cfg, std::span<const double> T_ladder,
                                         const SamplingOptions& options, const DiagnosticOptions& diag) {
  if (T_ladder.empty()) throw DomainError("T ladder is empty");
  for (std::size_t i = 1; i < T_ladder.size(); ++i)
    if (!(T_ladder[i] > T_ladder[i - 1])) throw DomainError("T ladder must be increasing");
  check_horizon(T_ladder.back(), family, region, cfg);
  std::vector<EmpiricalDistribution> distributions;
  for (std::size_t i = 0; i < T_ladder.size(); ++i) {
    SamplingOptions rung = options;
    rung.stream = streams::kLadderBase + i;
    distributions.push_back(empirical_distribution(T_ladder[i], family, region, cfg, rung));
  }
  return analyze_ladder(std::move(distributions), diag);
}

}  // namespace selfapprox
