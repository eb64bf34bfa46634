#include "selfapprox/meanvalue.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "selfapprox/errors.hpp"
#include "selfapprox/parallel.hpp"
#include "selfapprox/primes.hpp"

namespace selfapprox {

Complex trig_poly_eval(const TrigPolynomial& p, double tau) {
  if (p.frequencies.size() != p.coefficients.size())
    throw DomainError("trigonometric polynomial has mismatched frequencies and coefficients");
  Complex total;
  for (std::size_t n = 0; n < p.frequencies.size(); ++n) {
    const double phase = p.frequencies[n] * tau;
    total += p.coefficients[n] * Complex(std::cos(phase), std::sin(phase));
  }
  return total;
}

TrigPolynomial partial_sum_polynomial(Complex s, const DirichletCharacter& chi, std::uint64_t N, double d) {
  TrigPolynomial p;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const Complex c = chi(static_cast<std::int64_t>(n));
    if (c == Complex(0.0, 0.0)) continue;
    const double ln = std::log(static_cast<double>(n));
    p.frequencies.push_back(-d * ln);
    p.coefficients.push_back(c * std::exp(-s * ln));
  }
  return p;
}

double max_modulus_bound(double area_integral, double margin) {
  if (!(margin > 0.0)) throw DomainError("margin d must be positive");
  if (!(area_integral >= 0.0)) throw DomainError("area integral must be nonnegative");
  return std::sqrt(area_integral / std::numbers::pi) / margin;
}

double area_integral(const StripRegion& region, int cells, const std::function<double(Complex)>& h) {
  if (cells < 1) throw DomainError("area integral needs at least one cell");
  const double hs = (region.u_sigma_hi() - region.u_sigma_lo()) / cells;
  const double ht = (region.u_t_hi() - region.u_t_lo()) / cells;
  double total = 0.0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      total += h({region.u_sigma_lo() + (i + 0.5) * hs, region.u_t_lo() + (j + 0.5) * ht});
  return total * hs * ht;
}

namespace {

// Midpoints of the cells x cells partition of U as a StripRegion grid; the region's own
// margin is irrelevant for evaluation.
StripRegion u_midpoints(const StripRegion& region, int cells) {
  StripRegion mid = region;
  const double hs = (region.u_sigma_hi() - region.u_sigma_lo()) / cells;
  const double ht = (region.u_t_hi() - region.u_t_lo()) / cells;
  mid.sigma_lo = region.u_sigma_lo() + 0.5 * hs;
  mid.sigma_hi = region.u_sigma_hi() - 0.5 * hs;
  mid.t_lo = region.u_t_lo() + 0.5 * ht;
  mid.t_hi = region.u_t_hi() - 0.5 * ht;
  mid.grid_sigma = cells;
  mid.grid_t = cells;
  return mid;
}

double cell_area(const StripRegion& region, int cells) {
  return (region.u_sigma_hi() - region.u_sigma_lo()) * (region.u_t_hi() - region.u_t_lo()) / (cells * cells);
}

void check_strip_sigma(double sigma) {
  if (!(sigma > 0.5 && sigma < 1.0)) throw DomainError("sigma must lie in (1/2, 1)");
}

}  // namespace

SupCertificate g_sup_certificate(double tau, const ShiftFamily& family, const StripRegion& region,
                                 const EvaluatorConfig& cfg, int cells) {
  family.validate();
  region.validate();
  if (cells < 1) throw DomainError("area integral needs at least one cell");
  const auto values = shifted_grid_values(tau, family, u_midpoints(region, cells), full_l(cfg));
  SupCertificate out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    for (std::size_t k = j + 1; k < values.size(); ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < values[j].size(); ++i) sum += std::norm(values[j][i] - values[k][i]);
      out.area_integral = std::max(out.area_integral, sum * cell_area(region, cells));
    }
  }
  out.sup_bound = max_modulus_bound(out.area_integral, region.margin);
  return out;
}

double carlson_tail_sum(const DirichletCharacter& chi, double sigma, double y, const EvaluatorConfig& cfg) {
  check_strip_sigma(sigma);
  const auto principal = make_character(chi.modulus(), 0);
  const auto N = static_cast<std::uint64_t>(std::max(0.0, std::floor(y)));
  return (l_value(2.0 * sigma, principal, cfg) - l_partial_sum(2.0 * sigma, principal, N)).real();
}

double carlson_euler_limit(const DirichletCharacter& chi, double sigma, double y, const EvaluatorConfig& cfg) {
  check_strip_sigma(sigma);
  const auto principal = make_character(chi.modulus(), 0);
  const double smooth = y >= 2.0 ? l_truncated(2.0 * sigma, principal, y).real() : 1.0;
  return l_value(2.0 * sigma, principal, cfg).real() - smooth;
}

std::vector<CarlsonResult> carlson_mean_values(const DirichletCharacter& chi, Complex s, std::span<const double> ys,
                                               double x, double T, const SamplingOptions& options,
                                               Truncation truncation, const EvaluatorConfig& cfg) {
  check_strip_sigma(s.real());
  if (x == 0.0 || !std::isfinite(x)) throw DomainError("shift scale x must be nonzero");
  if (!(T > 0.0)) throw DomainError("horizon T must be positive");
  if (options.n_samples < 1) throw DomainError("n_samples must be positive");
  if (ys.empty()) throw DomainError("no truncation point y given");
  for (double y : ys)
    if (!(y >= 1.0)) throw DomainError("truncation point y must be at least 1");
  cfg.validate();
  if (std::abs(s.imag()) + std::abs(x) * T > cfg.t_cap) {
    std::ostringstream msg;
    msg << "|t| + |x| T exceeds the evaluator cap " << cfg.t_cap << "; largest usable T is "
        << (cfg.t_cap - std::abs(s.imag())) / std::abs(x);
    throw RangeError(msg.str());
  }

  const std::size_t n = options.n_samples;
  std::vector<std::vector<double>> values(ys.size(), std::vector<double>(n));
  parallel_for(n, options.threads, [&](std::size_t i) {
    const Complex point = s + Complex(0.0, x * sample_point(i, 0.0, T, options));
    const Complex full = l_value(point, chi, cfg);
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const Complex truncated = truncation == Truncation::kEulerProduct
                                    ? l_truncated(point, chi, ys[k])
                                    : l_partial_sum(point, chi, static_cast<std::uint64_t>(std::floor(ys[k])));
      values[k][i] = std::norm(full - truncated);
    }
  });

  std::vector<CarlsonResult> out;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    CarlsonResult r;
    r.y = ys[k];
    r.truncation = truncation;
    const auto est = mean_with_error(values[k]);
    r.empirical = est.mean;
    r.standard_error = est.standard_error;
    r.theoretical = carlson_tail_sum(chi, s.real(), ys[k], cfg);
    r.limit = truncation == Truncation::kEulerProduct ? carlson_euler_limit(chi, s.real(), ys[k], cfg)
                                                      : r.theoretical;
    r.samples = n;
    out.push_back(r);
  }
  return out;
}

CarlsonResult carlson_mean_value(const DirichletCharacter& chi, Complex s, double y, double x, double T,
                                 const SamplingOptions& options, Truncation truncation, const EvaluatorConfig& cfg) {
  const double ys[] = {y};
  return carlson_mean_values(chi, s, ys, x, T, options, truncation, cfg).front();
}

TailCheckReport truncation_tail_check(const DirichletCharacter& chi, std::span<const double> shifts,
                                      const KroneckerTarget& target, const StripRegion& region, double y, double T,
                                      const SamplingOptions& options, int cells) {
  region.validate();
  if (shifts.empty()) throw DomainError("tail check needs at least one shift");
  if (!(y >= target.prime_bound)) throw DomainError("tail check needs y >= v");
  if (!(T > 0.0)) throw DomainError("horizon T must be positive");
  if (options.n_samples < 1) throw DomainError("n_samples must be positive");
  if (cells < 1) throw DomainError("area integral needs at least one cell");

  TailCheckReport report;
  report.v = target.prime_bound;
  report.y = y;
  report.sigma1 = region.u_sigma_lo();
  report.meas_R = target.expected_density;
  report.prime_tail = prime_zeta_tail(2.0 * report.sigma1, report.v);
  report.bound = report.meas_R * report.prime_tail;
  report.samples = options.n_samples;

  const StripRegion mid = u_midpoints(region, cells);
  const auto sigmas = mid.sigmas();
  const auto ts = mid.ts();
  const double area = cell_area(region, cells);

  std::vector<double> values(options.n_samples, 0.0);
  std::vector<std::uint8_t> hit(options.n_samples, 0);
  parallel_for(options.n_samples, options.threads, [&](std::size_t i) {
    const double tau = sample_point(i, 0.0, T, options);
    if (!in_kronecker_set(tau, target)) return;
    hit[i] = 1;
    double sum = 0.0;
    for (double d : shifts)
      for (double t : ts)
        for (double sigma : sigmas) sum += std::norm(log_l_truncated_ratio({sigma, t + d * tau}, chi, report.v, y));
    values[i] = sum * area;
  });
  for (auto h : hit) report.hits += h;
  const auto est = mean_with_error(values);
  report.empirical = est.mean;
  report.standard_error = est.standard_error;
  report.ratio = report.bound > 0.0 ? report.empirical / report.bound : 0.0;

  const auto primes = primes_up_to(y);
  const double m = static_cast<double>(shifts.size());
  report.predicted = m * report.meas_R * area_integral(region, cells, [&](Complex s) {
    double acc = 0.0;
    for (std::uint32_t p : primes) {
      if (p <= report.v || chi.modulus() % p == 0) continue;
      acc += -std::log1p(-std::pow(static_cast<double>(p), -2.0 * s.real()));
    }
    return acc;
  });

  if (report.hits < 30) {
    report.warning = "only " + std::to_string(report.hits) +
                     " samples fell in the Kronecker set; increase samples or delta";
  }
  return report;
}

namespace {

// Partial sums sum_{n <= N} chi(n) n^{-(sigma + i t)} for every sigma and every N of the
// ascending ladder: result[r][i] for ladder rung r and sigma i.
std::vector<std::vector<Complex>> partial_sum_ladder(std::span<const double> sigmas, double t,
                                                     const DirichletCharacter& chi,
                                                     std::span<const std::uint64_t> ladder) {
  std::vector<std::vector<Complex>> out;
  std::vector<double> re(sigmas.size(), 0.0);
  std::vector<double> im(sigmas.size(), 0.0);
  const auto& table = chi.table();
  const std::uint64_t q = chi.modulus();
  std::uint64_t n = 1;
  for (std::uint64_t N : ladder) {
    for (; n <= N; ++n) {
      const Complex c = table[n % q];
      if (c == Complex(0.0, 0.0)) continue;
      const double ln = std::log(static_cast<double>(n));
      const double cs = std::cos(t * ln);
      const double sn = -std::sin(t * ln);
      const double wr = c.real() * cs - c.imag() * sn;
      const double wi = c.real() * sn + c.imag() * cs;
      for (std::size_t i = 0; i < sigmas.size(); ++i) {
        const double mag = std::exp(-sigmas[i] * ln);
        re[i] += mag * wr;
        im[i] += mag * wi;
      }
    }
    std::vector<Complex> row(sigmas.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i) row[i] = {re[i], im[i]};
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

B2Report b2_distance(const ShiftFamily& family, std::span<const std::uint64_t> N_ladder, double T,
                     const StripRegion& region, const EvaluatorConfig& cfg, const SamplingOptions& options,
                     std::size_t first, std::size_t second) {
  family.validate();
  region.validate();
  cfg.validate();
  if (first >= family.size() || second >= family.size() || first == second)
    throw DomainError("b2 pair indices must be two distinct members of the family");
  if (N_ladder.empty()) throw DomainError("N ladder is empty");
  for (std::size_t r = 0; r < N_ladder.size(); ++r) {
    if (N_ladder[r] < 1) throw DomainError("partial-sum length N must be at least 1");
    if (r > 0 && N_ladder[r] <= N_ladder[r - 1]) throw DomainError("N ladder must be increasing");
  }
  if (options.n_samples < 1) throw DomainError("n_samples must be positive");
  const ShiftFamily pair{{family.shifts[first], family.shifts[second]},
                         {family.characters[first], family.characters[second]}};
  check_horizon(T, pair, region, cfg);

  const auto sigmas = region.sigmas();
  const auto ts = region.ts();
  const std::size_t rungs = N_ladder.size();
  const std::size_t n = options.n_samples;
  // Per sample and rung: |f - f_N|^2, a, b, and |f - f_N|.
  std::vector<std::vector<double>> sq(rungs, std::vector<double>(n));
  std::vector<std::vector<double>> av(rungs, std::vector<double>(n));
  std::vector<std::vector<double>> bv(rungs, std::vector<double>(n));
  parallel_for(n, options.threads, [&](std::size_t i) {
    const double tau = sample_point(i, -T, 2.0 * T, options);
    const auto full = shifted_grid_values(tau, pair, region, full_l(cfg));
    // partial[k][r] holds the grid values of L_N for shift k at rung r, t-major.
    std::vector<std::vector<std::vector<Complex>>> partial(2, std::vector<std::vector<Complex>>(rungs));
    for (std::size_t k = 0; k < 2; ++k) {
      for (double t : ts) {
        const auto ladder = partial_sum_ladder(sigmas, t + pair.shifts[k] * tau, pair.characters[k], N_ladder);
        for (std::size_t r = 0; r < rungs; ++r)
          partial[k][r].insert(partial[k][r].end(), ladder[r].begin(), ladder[r].end());
      }
    }
    const double f = max_pairwise_difference(full);
    for (std::size_t r = 0; r < rungs; ++r) {
      double fN = 0.0;
      double a = 0.0;
      double b = 0.0;
      for (std::size_t g = 0; g < full[0].size(); ++g) {
        fN = std::max(fN, std::abs(partial[0][r][g] - partial[1][r][g]));
        a = std::max(a, std::abs(full[0][g] - partial[0][r][g]));
        b = std::max(b, std::abs(full[1][g] - partial[1][r][g]));
      }
      sq[r][i] = (f - fN) * (f - fN);
      av[r][i] = a;
      bv[r][i] = b;
    }
  });

  B2Report report;
  report.horizon = T;
  report.first = first;
  report.second = second;
  report.samples = n;
  for (std::size_t r = 0; r < rungs; ++r) {
    B2Entry e;
    e.N = N_ladder[r];
    const auto est = mean_with_error(sq[r]);
    e.distance = est.mean;
    e.standard_error = est.standard_error;
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = av[r][i];
      const double b = bv[r][i];
      const double diff = std::sqrt(sq[r][i]);
      const double slack = 1e-12 * (1.0 + a + b);
      if (diff > a + b + slack) ++e.triangle_violations;
      if (sq[r][i] > 2.0 * a * a + 2.0 * b * b + slack) ++e.decomposition_violations;
      bound += 2.0 * a * a + 2.0 * b * b;
    }
    e.decomposed_bound = bound / static_cast<double>(n);
    if (r > 0 && !(e.distance < report.ladder.back().distance)) report.decreasing = false;
    report.ladder.push_back(e);
  }
  return report;
}

}  // namespace selfapprox
