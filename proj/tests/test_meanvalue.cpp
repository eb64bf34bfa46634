#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "selfapprox/errors.hpp"
#include "selfapprox/meanvalue.hpp"
#include "selfapprox/primes.hpp"

using namespace selfapprox;

namespace {

const DirichletCharacter chi4 = parse_character("4:1");
const DirichletCharacter zeta_chi = parse_character("1:0");

SamplingOptions opts(std::uint64_t n, std::uint64_t seed) {
  SamplingOptions o;
  o.n_samples = n;
  o.seed = seed;
  o.refine = false;
  return o;
}

// sum_{n > y, gcd(n, q) = 1} n^{-2 sigma} from the bounded series oracle minus the head.
oracle::Bounded tail_oracle(const DirichletCharacter& chi, double sigma, std::uint64_t y) {
  const auto principal = make_character(chi.modulus(), 0);
  auto total = oracle::dirichlet_series(2.0 * sigma, principal, 2'000'000);
  for (std::uint64_t n = 1; n <= y; ++n) total.value -= principal(static_cast<std::int64_t>(n)) * std::pow(n, -2.0 * sigma);
  return total;
}

std::uint64_t largest_prime_factor(std::uint64_t n) {
  std::uint64_t best = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      best = p;
      n /= p;
    }
  }
  return n > 1 ? std::max(best, n) : best;
}

}  // namespace

TEST_CASE("trigonometric polynomials") {
  CHECK(trig_poly_eval({}, 3.0) == Complex(0.0, 0.0));
  const TrigPolynomial one{{0.0}, {Complex(1.0, 0.0)}};
  for (double tau : {-5.0, 0.0, 2.5}) CHECK(trig_poly_eval(one, tau) == Complex(1.0, 0.0));
  const double l2 = std::log(2.0);
  const Complex p = trig_poly_eval({{l2}, {Complex(1.0, 0.0)}}, 2.0 * std::numbers::pi / l2);
  CHECK(std::abs(p - Complex(1.0, 0.0)) < 1e-14);
  CHECK_THROWS_AS(trig_poly_eval({{1.0}, {}}, 0.0), DomainError);
}

TEST_CASE("partial sums are trigonometric polynomials in tau") {
  const Complex s(0.7, 0.3);
  const auto p = partial_sum_polynomial(s, chi4, 50, 2.0);
  CHECK(p.frequencies.size() == 25);
  for (double tau : {0.0, 1.0, -7.25, 130.0}) {
    const Complex direct = l_partial_sum(s + Complex(0.0, 2.0 * tau), chi4, 50);
    CHECK(std::abs(trig_poly_eval(p, tau) - direct) < 1e-12);
  }
}

TEST_CASE("area-to-sup bound") {
  CHECK(max_modulus_bound(std::numbers::pi, 1.0) == doctest::Approx(1.0));
  CHECK(max_modulus_bound(0.0, 0.3) == 0.0);
  CHECK(max_modulus_bound(4.0 * std::numbers::pi, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(max_modulus_bound(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(max_modulus_bound(-1.0, 1.0), DomainError);

  const StripRegion region;
  CHECK(area_integral(region, 4, [](Complex) { return 1.0; }) == doctest::Approx(0.3 * 1.2));
  CHECK(area_integral(region, 7, [](Complex s) { return s.real(); }) == doctest::Approx(0.7 * 0.3 * 1.2));

  // A holomorphic test function: the bound dominates its maximum on K.
  const auto f = [](Complex s) { return std::exp(3.0 * s) - Complex(2.0, 1.0) * s * s; };
  const double integral = area_integral(region, 200, [&](Complex s) { return std::norm(f(s)); });
  double max_k = 0.0;
  for (double sigma : linspace(region.sigma_lo, region.sigma_hi, 21))
    for (double t : linspace(region.t_lo, region.t_hi, 21)) max_k = std::max(max_k, std::abs(f({sigma, t})));
  CHECK(max_k <= max_modulus_bound(integral, region.margin));
}

TEST_CASE("grid refinement stays under the area-integral bound") {
  const StripRegion region;
  const EvaluatorConfig cfg;
  const ShiftFamily fam{{1.0, 2.0}, {chi4, chi4}};
  for (double tau : {0.75, 12.0, 333.3, 1500.0}) {
    const auto sample = g_sample(tau, fam, region, cfg, true);
    const double fine = sample.refine_delta < 1.0 ? sample.g / (1.0 - sample.refine_delta) : 0.0;
    const auto cert = g_sup_certificate(tau, fam, region, cfg);
    CHECK(fine <= cert.sup_bound);
    CHECK(fine - sample.g <= cert.sup_bound);
  }
  const ShiftFamily degenerate{{1.0, 1.0}, {chi4, chi4}};
  CHECK(g_sup_certificate(5.0, degenerate, region, cfg).sup_bound == 0.0);
}

TEST_CASE("Carlson tail sums") {
  const auto oracle_value = tail_oracle(chi4, 0.75, 20);
  const double tail = carlson_tail_sum(chi4, 0.75, 20);
  CHECK(std::abs(tail - oracle_value.value.real()) < oracle_value.bound + 1e-9);
  CHECK(tail == doctest::Approx(0.2235).epsilon(1e-3));
  double prev = tail;
  for (double y : {100.0, 1e4, 1e6}) {
    const double next = carlson_tail_sum(chi4, 0.75, y);
    CHECK(next < prev);
    CHECK(next > 0.0);
    prev = next;
  }
  CHECK(prev < 2e-3);
  CHECK_THROWS_AS(carlson_tail_sum(chi4, 0.5, 20), DomainError);
}

TEST_CASE("Euler-product Carlson limit against direct enumeration") {
  // sigma = 0.9: n^{-1.8} tail beyond M is at most M^{-0.8} / 0.8.
  const std::uint64_t M = 2'000'000;
  const double sigma = 0.9;
  for (double y : {3.0, 20.0}) {
    double direct = 0.0;
    for (std::uint64_t n = 3; n <= M; n += 2)
      if (largest_prime_factor(n) > y) direct += std::pow(static_cast<double>(n), -2.0 * sigma);
    const double bound = std::pow(static_cast<double>(M), 1.0 - 2.0 * sigma) / (2.0 * sigma - 1.0);
    const double limit = carlson_euler_limit(chi4, sigma, y);
    CHECK(limit >= direct - 1e-9);
    CHECK(limit <= direct + bound);
  }
  CHECK(carlson_euler_limit(chi4, 0.75, 20) < carlson_tail_sum(chi4, 0.75, 20));
}

TEST_CASE("Carlson mean value at small scale") {
  const std::vector<double> ys{5.0, 20.0, 80.0};
  const auto partial = carlson_mean_values(chi4, 0.75, ys, 1.0, 2000.0, opts(1500, 3), Truncation::kPartialSum);
  REQUIRE(partial.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(partial[k].empirical >= 0.0);
    CHECK(partial[k].limit == partial[k].theoretical);
    CHECK(std::abs(partial[k].empirical - partial[k].theoretical) < 0.25 * partial[k].theoretical);
    if (k > 0) CHECK(partial[k].empirical < partial[k - 1].empirical);
  }
  const auto euler = carlson_mean_values(chi4, 0.75, ys, 1.0, 400.0, opts(1500, 3), Truncation::kEulerProduct);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(euler[k].empirical >= 0.0);
    CHECK(euler[k].limit < euler[k].theoretical);
    if (k > 0) CHECK(euler[k].empirical < euler[k - 1].empirical);
  }
  auto threaded = opts(1500, 3);
  threaded.threads = 3;
  CHECK(carlson_mean_value(chi4, 0.75, 20.0, 1.0, 2000.0, threaded, Truncation::kPartialSum).empirical ==
        partial[1].empirical);

  CHECK_THROWS_AS(carlson_mean_value(chi4, 0.75, 20.0, 0.0, 400.0, opts(5, 1)), DomainError);
  CHECK_THROWS_AS(carlson_mean_value(chi4, 1.2, 20.0, 1.0, 400.0, opts(5, 1)), DomainError);
  CHECK_THROWS_AS(carlson_mean_value(chi4, 0.75, 20.0, 20.0, 5000.0, opts(5, 1)), RangeError);
}

TEST_CASE("truncation tail check") {
  const StripRegion region;
  const std::vector<double> d{1.0, 2.0};
  {
    const auto target = make_kronecker_target({1.0}, 1, 0.3, 5.0);
    const auto r = truncation_tail_check(chi4, d, target, region, 5.0, 1000.0, opts(200, 2));
    CHECK(r.empirical == 0.0);
    CHECK(r.predicted == 0.0);
    CHECK(r.hits > 0);
  }
  {
    const auto target = make_kronecker_target({1.0}, 1, 0.3, 2.0);
    const std::vector<double> one{1.0};
    const auto r = truncation_tail_check(zeta_chi, one, target, region, 3.0, 1000.0, opts(400, 2));
    CHECK(r.empirical > 0.0);
    CHECK(std::isfinite(r.empirical));
    CHECK(r.warning.empty());
    // The integrand is |log(1 - 3^{-s})|^2 integrated over U.
    CHECK(r.predicted == doctest::Approx(0.6 * area_integral(region, 6, [](Complex s) {
                                           return -std::log1p(-std::pow(3.0, -2.0 * s.real()));
                                         })));
  }
  for (double v : {10.0, 30.0, 100.0}) {
    const auto target = make_kronecker_target({1.0}, 1, 0.45, v);
    const auto r = truncation_tail_check(chi4, d, target, region, 1000.0, 1e4, opts(400, 5));
    CHECK(r.bound > 0.0);
    CHECK(r.ratio > 0.0);
    CHECK(std::isfinite(r.ratio));
    MESSAGE("v=" << v << " hits=" << r.hits << " empirical=" << r.empirical << " bound=" << r.bound
                 << " ratio=" << r.ratio << " predicted=" << r.predicted);
  }
  {
    const auto target = make_kronecker_target({1.0}, 1, 0.01, 7.0);
    const auto r = truncation_tail_check(chi4, d, target, region, 50.0, 1e3, opts(50, 5));
    CHECK_FALSE(r.warning.empty());
  }
}

TEST_CASE("B2 distance") {
  const StripRegion region;
  const EvaluatorConfig cfg;
  {
    const ShiftFamily degenerate{{1.0, 1.0}, {chi4, chi4}};
    const std::vector<std::uint64_t> ladder{1, 10};
    const auto r = b2_distance(degenerate, ladder, 100.0, region, cfg, opts(10, 1));
    for (const auto& e : r.ladder) CHECK(e.distance == 0.0);
  }
  const ShiftFamily fam{{1.0, 2.0}, {chi4, chi4}};
  {
    const std::vector<std::uint64_t> ladder{1};
    const auto r = b2_distance(fam, ladder, 100.0, region, cfg, opts(30, 4));
    double mean_f2 = 0.0;
    auto o = opts(30, 4);
    for (std::uint64_t i = 0; i < 30; ++i) {
      const double f = g_value(sample_point(i, -100.0, 200.0, o), fam, region, cfg);
      mean_f2 += f * f / 30.0;
    }
    CHECK(r.ladder[0].distance == doctest::Approx(mean_f2).epsilon(1e-12));
    CHECK(r.ladder[0].distance > 0.0);
  }
  {
    const std::vector<std::uint64_t> ladder{10, 100, 1000};
    const auto r = b2_distance(fam, ladder, 300.0, region, cfg, opts(60, 6));
    for (const auto& e : r.ladder) {
      CHECK(e.triangle_violations == 0);
      CHECK(e.decomposition_violations == 0);
      CHECK(e.decomposed_bound >= e.distance);
    }
    CHECK(r.decreasing);
  }
  const std::vector<std::uint64_t> bad{10, 5};
  CHECK_THROWS_AS(b2_distance(fam, bad, 10.0, region, cfg, opts(2, 1)), DomainError);
}

TEST_CASE("max identity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1e3);
  int worst_ulps = 0;
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng);
    const double b = i % 10 == 0 ? a : u(rng);
    const double lhs = std::max(a, b);
    const double rhs = (std::abs(a - b) + (a + b)) / 2.0;
    int ulps = 0;
    for (double x = lhs; x != rhs && ulps < 4; ++ulps) x = std::nextafter(x, rhs);
    worst_ulps = std::max(worst_ulps, ulps);
  }
  CHECK(worst_ulps <= 1);
}
