#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selfapprox/shift.hpp"
#include "selfapprox/stats.hpp"

namespace selfapprox {

enum class RelationMode { kExact, kFloat };

struct RelationOptions {
  RelationMode mode = RelationMode::kExact;
  /// Float mode: a relation is claimed only if |a d_k - sum_j a_kj d_j| < tolerance.
  double tolerance = 1e-10;
  /// Float mode: largest admissible |coefficient| in a primitive relation.
  std::int64_t coeff_cap = 1'000'000;
};

/// d_k = (1/a) sum_j a_kj d_j for every dependent k, over a maximal Q-independent subset.
struct LinearRelation {
  std::vector<std::size_t> independent_indices;
  std::vector<std::size_t> dependent_indices;
  std::int64_t denominator = 1;  // a
  /// coefficients[r][j]: row r belongs to dependent_indices[r], column j to independent_indices[j].
  std::vector<std::vector<std::int64_t>> coefficients;
  std::int64_t bound_A = 0;
  RelationMode mode = RelationMode::kExact;
  /// Largest |a d_k - sum_j a_kj d_j| over dependent k (0 in exact mode).
  double max_residual = 0.0;

  [[nodiscard]] std::size_t rank() const { return independent_indices.size(); }
};

/// Greedy by index order, so the first shift is always independent. Throws DomainError
/// on a zero shift, or in exact mode on a shift without an exact rational value.
LinearRelation find_rational_relations(std::span<const Shift> shifts, const RelationOptions& options = {});

/// Distance from x to the nearest integer (round half to even).
double dist_to_integer(double x);

/// Data of the Kronecker set S_T(delta, v): tau with ||tau d_n log p / (2 pi a)|| < delta
/// for all primes p <= v and all independent shifts d_n.
struct KroneckerTarget {
  std::vector<double> shifts;
  std::int64_t denominator = 1;
  double delta = 0.1;
  double prime_bound = 2.0;
  std::vector<std::uint32_t> primes;
  double expected_density = 0.0;  // (2 delta)^{l M}
  /// Frequencies d_n log p / (2 pi a), shift-major.
  std::vector<double> frequencies;

  [[nodiscard]] std::size_t dimension() const { return frequencies.size(); }
};

/// Throws DomainError unless 0 < delta < 1/2, a != 0, shifts nonempty and nonzero, and at least one prime <= v.
KroneckerTarget make_kronecker_target(std::vector<double> shifts, std::int64_t denominator, double delta,
                                      double prime_bound);

bool in_kronecker_set(double tau, const KroneckerTarget& target);

/// max over dependent k and p <= v of ||tau d_k log p / (2 pi)||. When tau lies in the
/// set this is below bound_A * delta.
double max_dependent_distance(double tau, const KroneckerTarget& target, std::span<const double> all_shifts,
                              const LinearRelation& relation);

enum class Sampling { kUniform, kStratified };

struct KroneckerDensity {
  double density = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  Interval ci;
  double standard_error = 0.0;  // Wilson half-width / z
  double expected = 0.0;
};

/// Monte Carlo estimate of (1/T) meas S_T. Sample i uses tau_i = T * u(seed, i) (uniform)
/// or tau_i = T * (i + u0) / n (stratified); deterministic for any thread count.
KroneckerDensity measure_kronecker_density(const KroneckerTarget& target, double T, std::uint64_t n_samples,
                                           std::uint64_t seed, Sampling sampling = Sampling::kUniform,
                                           unsigned threads = 1);

enum class TauSearch { kGrid, kLattice };

/// Points of S_T in [0, search_bound], ascending; always contains 0. Every element
/// satisfies in_kronecker_set.
std::vector<double> find_tau_in_set(const KroneckerTarget& target, double search_bound,
                                    TauSearch strategy = TauSearch::kGrid);

/// Grid step used by the grid strategy: delta 2 pi a / max |d_n| log p.
double grid_step(const KroneckerTarget& target);

struct IndependenceReport {
  bool relation_found = false;
  std::vector<std::int64_t> coefficients;
  double residual = 0.0;
  int precision_digits = 0;
  std::int64_t coeff_cap = 0;
  /// Lower bound on the norm of any relation at this precision.
  double norm_bound = 0.0;
  bool precision_exhausted = false;
  /// Labels "d_k*log(p)" in the order of coefficients.
  std::vector<std::string> terms;
};

/// Integer-relation search on {d_k log p_n} with the values rounded to precision_digits.
IndependenceReport check_log_prime_independence(std::span<const Shift> shifts, std::span<const std::uint32_t> primes,
                                                int precision_digits, std::int64_t coeff_cap);

}  // namespace selfapprox
