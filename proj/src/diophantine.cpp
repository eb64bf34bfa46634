#include "selfapprox/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "selfapprox/errors.hpp"
#include "selfapprox/integer_relation.hpp"
#include "selfapprox/parallel.hpp"
#include "selfapprox/primes.hpp"
#include "selfapprox/random.hpp"

namespace selfapprox {

namespace {

void assemble(LinearRelation& rel, const std::vector<std::size_t>& dependent,
              const std::vector<std::vector<std::int64_t>>& primitive) {
  // primitive[r] = (c_1, ..., c_l, c_k) with c_k > 0 and c_k d_k + sum_j c_j d_j = 0
  std::int64_t a = 1;
  for (const auto& row : primitive) a = std::lcm(a, row.back());
  rel.dependent_indices = dependent;
  rel.denominator = a;
  rel.coefficients.clear();
  rel.bound_A = 0;
  for (const auto& row : primitive) {
    const std::int64_t scale = a / row.back();
    std::vector<std::int64_t> coeff;
    std::int64_t sum = 0;
    for (std::size_t j = 0; j + 1 < row.size(); ++j) {
      coeff.push_back(-row[j] * scale);
      sum += std::abs(coeff.back());
    }
    rel.bound_A = std::max(rel.bound_A, sum);
    rel.coefficients.push_back(std::move(coeff));
  }
}

double relation_residual(const LinearRelation& rel, std::size_t r, std::span<const Shift> shifts) {
  double acc = static_cast<double>(rel.denominator) * shifts[rel.dependent_indices[r]].value;
  for (std::size_t j = 0; j < rel.independent_indices.size(); ++j) {
    acc -= static_cast<double>(rel.coefficients[r][j]) * shifts[rel.independent_indices[j]].value;
  }
  return std::abs(acc);
}

LinearRelation exact_relations(std::span<const Shift> shifts) {
  LinearRelation rel;
  rel.mode = RelationMode::kExact;
  rel.independent_indices = {0};
  const Rational base = *shifts[0].exact;
  std::vector<std::size_t> dependent;
  std::vector<std::vector<std::int64_t>> primitive;
  for (std::size_t k = 1; k < shifts.size(); ++k) {
    // d_k = (u/w) d_1  ->  w d_k - u d_1 = 0
    const Rational ratio = *shifts[k].exact / base;
    dependent.push_back(k);
    primitive.push_back({-ratio.numerator(), ratio.denominator()});
  }
  assemble(rel, dependent, primitive);
  return rel;
}

LinearRelation float_relations(std::span<const Shift> shifts, const RelationOptions& options) {
  LinearRelation rel;
  rel.mode = RelationMode::kFloat;
  std::vector<std::size_t> independent{0};
  std::vector<std::size_t> dependent;
  std::vector<std::vector<std::int64_t>> primitive;
  PslqOptions pslq_options;
  pslq_options.coeff_cap = options.coeff_cap;
  pslq_options.residual_tolerance = options.tolerance;
  for (std::size_t k = 1; k < shifts.size(); ++k) {
    std::vector<HighPrecision> x;
    for (std::size_t i : independent) x.emplace_back(shifts[i].value);
    x.emplace_back(shifts[k].value);
    const auto found = pslq(x, pslq_options);
    bool is_dependent = false;
    if (found.relation && found.relation->back() != 0) {
      auto row = *found.relation;
      if (row.back() < 0)
        for (auto& c : row) c = -c;
      // Keep the relation only if it still holds after rescaling to the common denominator.
      LinearRelation trial = rel;
      trial.independent_indices = independent;
      auto trial_dependent = dependent;
      auto trial_primitive = primitive;
      trial_dependent.push_back(k);
      trial_primitive.push_back(row);
      assemble(trial, trial_dependent, trial_primitive);
      bool ok = true;
      for (std::size_t r = 0; r < trial_dependent.size(); ++r) {
        if (!(relation_residual(trial, r, shifts) < options.tolerance)) ok = false;
      }
      if (ok) {
        dependent = std::move(trial_dependent);
        primitive = std::move(trial_primitive);
        is_dependent = true;
      }
    }
    if (!is_dependent) {
      if (!dependent.empty()) {
        // New independent column: existing rows get a zero coefficient for it.
        for (auto& row : primitive) row.insert(row.end() - 1, 0);
      }
      independent.push_back(k);
    }
  }
  rel.independent_indices = independent;
  assemble(rel, dependent, primitive);
  for (std::size_t r = 0; r < rel.dependent_indices.size(); ++r) {
    rel.max_residual = std::max(rel.max_residual, relation_residual(rel, r, shifts));
  }
  return rel;
}

// LLL reduction (delta = 3/4) of the rows of `basis`, Gram-Schmidt recomputed after each update.
void lll_reduce(std::vector<std::vector<long double>>& basis) {
  const std::size_t n = basis.size();
  if (n < 2) return;
  const std::size_t dim = basis[0].size();
  std::vector<std::vector<long double>> star(n, std::vector<long double>(dim));
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0.0L));
  std::vector<long double> norms(n);
  auto dot = [dim](const std::vector<long double>& u, const std::vector<long double>& v) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < dim; ++i) acc += u[i] * v[i];
    return acc;
  };
  auto gram_schmidt = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      star[i] = basis[i];
      for (std::size_t j = 0; j < i; ++j) {
        mu[i][j] = norms[j] > 0 ? dot(basis[i], star[j]) / norms[j] : 0.0L;
        for (std::size_t d = 0; d < dim; ++d) star[i][d] -= mu[i][j] * star[j][d];
      }
      norms[i] = dot(star[i], star[i]);
    }
  };
  gram_schmidt();
  std::size_t k = 1;
  int guard = 0;
  while (k < n && guard++ < 100000) {
    for (std::size_t j = k; j-- > 0;) {
      const long double r = std::round(mu[k][j]);
      if (r != 0.0L) {
        for (std::size_t d = 0; d < dim; ++d) basis[k][d] -= r * basis[j][d];
        gram_schmidt();
      }
    }
    if (norms[k] >= (0.75L - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1]) {
      ++k;
    } else {
      std::swap(basis[k], basis[k - 1]);
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
}

void add_multiples(std::vector<double>& out, double tau0, const KroneckerTarget& target, double bound) {
  if (!(tau0 > 0.0)) return;
  for (int j = 1; j <= 1000 && j * tau0 <= bound; ++j) {
    const double tau = j * tau0;
    if (in_kronecker_set(tau, target)) out.push_back(tau);
  }
}

std::vector<double> lattice_search(const KroneckerTarget& target, double bound) {
  std::vector<double> out{0.0};
  const std::size_t K = target.dimension();
  const double alpha = std::abs(target.frequencies[0]);
  const double n_max = std::floor(alpha * bound);
  if (n_max < 1.0) return out;
  if (K == 1) {
    for (double n = 1; n <= std::min(n_max, 10000.0); n += 1.0) {
      const double tau = n / alpha;
      if (in_kronecker_set(tau, target)) out.push_back(tau);
    }
    return out;
  }
  const long double eps0 = static_cast<long double>(target.delta) / n_max;
  std::vector<std::vector<long double>> basis(K, std::vector<long double>(K, 0.0L));
  basis[0][0] = eps0;
  for (std::size_t i = 1; i < K; ++i) {
    basis[0][i] = static_cast<long double>(target.frequencies[i]) / static_cast<long double>(target.frequencies[0]);
    basis[i][i] = 1.0L;
  }
  lll_reduce(basis);

  const int radius = K <= 4 ? 2 : 1;
  const std::size_t combos_dim = std::min<std::size_t>(K, 8);
  std::vector<int> coeff(combos_dim, -radius);
  std::vector<double> seeds;
  while (true) {
    std::vector<long double> v(K, 0.0L);
    for (std::size_t r = 0; r < combos_dim; ++r)
      for (std::size_t d = 0; d < K; ++d) v[d] += coeff[r] * basis[r][d];
    const long double n = std::round(v[0] / eps0);
    if (n != 0.0L) {
      const double tau = static_cast<double>(std::fabs(n)) / alpha;
      if (tau <= bound && in_kronecker_set(tau, target)) seeds.push_back(tau);
    }
    std::size_t pos = 0;
    while (pos < combos_dim && coeff[pos] == radius) coeff[pos++] = -radius;
    if (pos == combos_dim) break;
    ++coeff[pos];
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  for (double tau : seeds) add_multiples(out, tau, target, bound);
  return out;
}

std::vector<double> grid_search(const KroneckerTarget& target, double bound) {
  std::vector<double> out;
  const double h = grid_step(target);
  const auto steps = static_cast<std::uint64_t>(std::floor(bound / h));
  std::uint64_t run_start = 0;
  bool in_run = false;
  auto close_run = [&](std::uint64_t first, std::uint64_t last) {
    if (first == 0) {
      out.push_back(0.0);
      return;
    }
    const double mid = 0.5 * static_cast<double>(first + last) * h;
    out.push_back(in_kronecker_set(mid, target) ? mid : static_cast<double>(first) * h);
  };
  for (std::uint64_t i = 0; i <= steps; ++i) {
    const bool hit = in_kronecker_set(static_cast<double>(i) * h, target);
    if (hit && !in_run) {
      run_start = i;
      in_run = true;
    } else if (!hit && in_run) {
      close_run(run_start, i - 1);
      in_run = false;
    }
  }
  if (in_run) close_run(run_start, steps);
  if (out.empty() || out.front() != 0.0) out.insert(out.begin(), 0.0);
  return out;
}

}  // namespace

LinearRelation find_rational_relations(std::span<const Shift> shifts, const RelationOptions& options) {
  if (shifts.empty()) throw DomainError("relation search needs at least one shift");
  for (const auto& d : shifts) {
    if (d.value == 0.0) throw DomainError("shift '" + d.text + "' is zero; shifts must be nonzero");
  }
  if (options.mode == RelationMode::kExact) {
    for (const auto& d : shifts) {
      if (!d.exact) throw DomainError("exact mode needs rational shifts; '" + d.text + "' is not");
    }
    return exact_relations(shifts);
  }
  if (!(options.tolerance > 0.0) || options.coeff_cap < 1) {
    throw DomainError("float mode needs a positive tolerance and coefficient cap");
  }
  return float_relations(shifts, options);
}

double dist_to_integer(double x) { return std::abs(x - std::nearbyint(x)); }

KroneckerTarget make_kronecker_target(std::vector<double> shifts, std::int64_t denominator, double delta,
                                      double prime_bound) {
  if (shifts.empty()) throw DomainError("Kronecker target needs at least one shift");
  for (double d : shifts)
    if (d == 0.0 || !std::isfinite(d)) throw DomainError("Kronecker target shifts must be finite and nonzero");
  if (denominator == 0) throw DomainError("denominator a must be nonzero");
  if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
  KroneckerTarget t;
  t.shifts = std::move(shifts);
  t.denominator = denominator;
  t.delta = delta;
  t.prime_bound = prime_bound;
  const auto primes = primes_up_to(prime_bound);
  if (primes.empty()) throw DomainError("prime bound v must be at least 2");
  t.primes.assign(primes.begin(), primes.end());
  const double scale = 2.0 * std::numbers::pi * static_cast<double>(denominator);
  for (double d : t.shifts)
    for (auto p : t.primes) t.frequencies.push_back(d * std::log(static_cast<double>(p)) / scale);
  t.expected_density = std::pow(2.0 * delta, static_cast<double>(t.frequencies.size()));
  return t;
}

bool in_kronecker_set(double tau, const KroneckerTarget& target) {
  for (double f : target.frequencies) {
    if (!(dist_to_integer(tau * f) < target.delta)) return false;
  }
  return true;
}

double max_dependent_distance(double tau, const KroneckerTarget& target, std::span<const double> all_shifts,
                              const LinearRelation& relation) {
  double worst = 0.0;
  for (std::size_t k : relation.dependent_indices) {
    for (auto p : target.primes) {
      const double x = tau * all_shifts[k] * std::log(static_cast<double>(p)) / (2.0 * std::numbers::pi);
      worst = std::max(worst, dist_to_integer(x));
    }
  }
  return worst;
}

KroneckerDensity measure_kronecker_density(const KroneckerTarget& target, double T, std::uint64_t n_samples,
                                           std::uint64_t seed, Sampling sampling, unsigned threads) {
  if (!(T > 0.0)) throw DomainError("horizon T must be positive");
  if (n_samples < 1) throw DomainError("n_samples must be positive");
  const double offset = random_uniform(seed, streams::kStratifiedOffset, 0);
  std::vector<std::uint8_t> hit(n_samples, 0);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    const double u = sampling == Sampling::kUniform
                         ? random_uniform(seed, streams::kTauSamples, i)
                         : (static_cast<double>(i) + offset) / static_cast<double>(n_samples);
    hit[i] = in_kronecker_set(T * u, target) ? 1 : 0;
  });
  KroneckerDensity out;
  out.samples = n_samples;
  for (auto h : hit) out.hits += h;
  out.density = static_cast<double>(out.hits) / static_cast<double>(n_samples);
  out.ci = wilson_interval(out.hits, n_samples);
  out.standard_error = wilson_standard_error(out.hits, n_samples);
  out.expected = target.expected_density;
  return out;
}

double grid_step(const KroneckerTarget& target) {
  double fmax = 0.0;
  for (double f : target.frequencies) fmax = std::max(fmax, std::abs(f));
  return target.delta / fmax;
}

std::vector<double> find_tau_in_set(const KroneckerTarget& target, double search_bound, TauSearch strategy) {
  if (!(search_bound > 0.0)) throw DomainError("search bound must be positive");
  auto out = strategy == TauSearch::kGrid ? grid_search(target, search_bound) : lattice_search(target, search_bound);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](double tau) { return !in_kronecker_set(tau, target); });
  return out;
}

IndependenceReport check_log_prime_independence(std::span<const Shift> shifts, std::span<const std::uint32_t> primes,
                                                int precision_digits, std::int64_t coeff_cap) {
  if (shifts.empty() || primes.empty()) throw DomainError("need at least one shift and one prime");
  if (precision_digits < 10 || precision_digits > 90) throw DomainError("precision_digits must lie in [10, 90]");
  if (coeff_cap < 1) throw DomainError("coefficient cap must be positive");
  for (std::size_t i = 0; i < primes.size(); ++i)
    for (std::size_t j = i + 1; j < primes.size(); ++j)
      if (primes[i] == primes[j]) throw DomainError("primes must be distinct");

  IndependenceReport report;
  report.precision_digits = precision_digits;
  report.coeff_cap = coeff_cap;
  std::vector<HighPrecision> x;
  HighPrecision largest = 0;
  for (const auto& d : shifts) {
    const HighPrecision dv = d.high_precision();
    for (auto p : primes) {
      x.push_back(round_to_digits(dv * boost::multiprecision::log(HighPrecision(p)), precision_digits));
      largest = std::max(largest, HighPrecision(boost::multiprecision::abs(x.back())));
      report.terms.push_back(d.text + "*log(" + std::to_string(p) + ")");
    }
  }
  if (x.size() == 1) {
    report.norm_bound = std::numeric_limits<double>::infinity();
    return report;
  }
  PslqOptions options;
  options.coeff_cap = coeff_cap;
  const HighPrecision tol = HighPrecision(static_cast<double>(x.size())) * HighPrecision(coeff_cap) * largest *
                            boost::multiprecision::pow(HighPrecision(10), 1 - precision_digits);
  options.residual_tolerance = tol.convert_to<double>();
  const auto found = pslq(x, options);
  report.norm_bound = found.norm_bound.convert_to<double>();
  report.precision_exhausted = found.precision_exhausted;
  if (found.relation) {
    report.relation_found = true;
    report.coefficients = *found.relation;
    report.residual = found.residual.convert_to<double>();
  }
  return report;
}

}  // namespace selfapprox
