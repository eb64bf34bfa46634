#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "selfapprox/errors.hpp"
#include "selfapprox/lfunc.hpp"
#include "selfapprox/primes.hpp"

using namespace selfapprox;

namespace {
const DirichletCharacter kZeta = make_character(1, 0);
const DirichletCharacter kChi4 = make_character(4, 1);
}  // namespace

TEST_CASE("evaluator config validation and shift count rule") {
  EvaluatorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  for (double t : {0.0, 1.0, 37.5, 1000.0, 5e4}) {
    CHECK(static_cast<double>(cfg.shift_count(t)) >= cfg.shift_factor * (t + 10.0));
    CHECK(cfg.shift_count(t) >= 50);
  }
  cfg.em_order = 7;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.em_order = 24;
  cfg.target_abs_error = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("Bernoulli coefficients") {
  const auto b = bernoulli_over_factorial(24);
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(1.0 / 12.0));      // B2/2!
  CHECK(b[2] == doctest::Approx(-1.0 / 720.0));    // B4/4!
  CHECK(b[3] == doctest::Approx(1.0 / 30240.0));   // B6/6!
}

TEST_CASE("hurwitz zeta at s = 2") {
  const auto ref = oracle::dirichlet_series(Complex(2.0, 0.0), kZeta, 1000000);
  REQUIRE(ref.bound < 1e-12);
  const Complex z = hurwitz_zeta(Complex(2.0, 0.0), 1.0);
  CHECK(std::abs(z - ref.value) < 1e-12);
  CHECK(std::abs(z.real() - 1.6449340668) < 1e-10);
  CHECK(std::abs(z - std::numbers::pi * std::numbers::pi / 6.0) < 1e-12);

  // zeta(s, 1/2) = (2^s - 1) zeta(s)
  const Complex half = hurwitz_zeta(Complex(2.0, 0.0), 0.5);
  CHECK(std::abs(half - 3.0 * ref.value) < 1e-11);
  CHECK(std::abs(half.real() - 4.9348022005) < 1e-10);
}

TEST_CASE("hurwitz zeta with a = 1 is riemann zeta and obeys the half-shift identity off the axis") {
  for (Complex s : {Complex(0.7, 3.0), Complex(1.5, -20.0), Complex(2.5, 100.0)}) {
    CHECK(hurwitz_zeta(s, 1.0) == riemann_zeta(s));
    const Complex lhs = hurwitz_zeta(s, 0.5);
    const Complex rhs = (std::exp(s * std::log(2.0)) - 1.0) * riemann_zeta(s);
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("hurwitz zeta errors") {
  CHECK_THROWS_AS(hurwitz_zeta(Complex(1.0, 0.0), 1.0), PoleError);
  CHECK_THROWS_AS(hurwitz_zeta(Complex(2.0, 0.0), 0.0), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(Complex(2.0, 0.0), 1.5), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(Complex(0.75, 6e4), 1.0), RangeError);
}

TEST_CASE("l_value examples") {
  CHECK(std::abs(l_value(Complex(2.0, 0.0), kZeta) - std::numbers::pi * std::numbers::pi / 6.0) < 1e-10);

  const Complex s(2.0, 3.0);
  const Complex direct = l_partial_sum(s, kChi4, 1000000);
  CHECK(std::abs(l_value(s, kChi4) - direct) < 1e-6);

  const Complex mid = l_value(Complex(0.75, 0.0), kChi4);
  CHECK(std::isfinite(mid.real()));
  CHECK(std::isfinite(mid.imag()));

  // Leibniz: L(1, chi_4) = pi/4, reached through the centered tail at the pole of the principal part.
  CHECK(std::abs(l_value(Complex(1.0, 0.0), kChi4) - std::numbers::pi / 4.0) < 1e-12);
}

TEST_CASE("l_value errors") {
  CHECK_THROWS_AS(l_value(Complex(1.0, 0.0), kZeta), PoleError);
  CHECK_THROWS_AS(l_value(Complex(1.0, 0.0), make_character(5, 0)), PoleError);
  CHECK_THROWS_AS(l_value(Complex(0.5, 1.0), kChi4), RangeError);
  CHECK_THROWS_AS(l_value(Complex(0.3, 1.0), kChi4), RangeError);
  CHECK_THROWS_AS(l_value(Complex(0.75, 50001.0), kChi4), RangeError);
}

TEST_CASE("cross validation against the direct series oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sig(1.5, 3.0);
  std::uniform_real_distribution<double> tee(-20.0, 20.0);
  std::vector<DirichletCharacter> chars;
  for (std::uint64_t q = 1; q <= 12; ++q)
    for (auto& c : enumerate_characters(q)) chars.push_back(std::move(c));
  for (int i = 0; i < 10; ++i) {
    const Complex s(sig(rng), tee(rng));
    const auto pw = oracle::powers(s, 100000);
    for (const auto& chi : chars) {
      const auto ref = oracle::dirichlet_series(s, chi, pw);
      REQUIRE(ref.bound < 1e-9);
      CHECK(std::abs(l_value(s, chi) - ref.value) < 1e-8);
    }
  }
}

TEST_CASE("conjugation symmetry for real characters") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> sig(0.55, 0.95);
  std::uniform_real_distribution<double> tee(-300.0, 300.0);
  for (const char* id : {"1:0", "4:1", "3:1", "8:1", "8:2", "8:3", "5:2"}) {
    const auto chi = parse_character(id);
    REQUIRE(chi.real_valued());
    for (int i = 0; i < 5; ++i) {
      const Complex s(sig(rng), tee(rng));
      CHECK(std::abs(l_value(std::conj(s), chi) - std::conj(l_value(s, chi))) < 1e-10);
    }
  }
}

TEST_CASE("tighter configuration agrees inside the strip") {
  EvaluatorConfig alt;
  alt.em_order = 12;
  alt.shift_factor = 3.0;
  alt.min_terms = 200;
  for (Complex s : {Complex(0.6, 5.0), Complex(0.75, 1000.0), Complex(0.9, -4321.0)}) {
    for (const char* id : {"1:0", "4:1", "5:1", "7:4"}) {
      const auto chi = parse_character(id);
      CHECK(std::abs(l_value(s, chi) - l_value(s, chi, alt)) < 1e-8);
    }
  }
}

TEST_CASE("column evaluation equals pointwise evaluation") {
  const std::vector<double> sigmas{0.6, 0.7, 0.8, 0.9};
  const auto chi = parse_character("5:1");
  const auto column = l_values_column(sigmas, 123.4, chi);
  for (std::size_t i = 0; i < sigmas.size(); ++i) CHECK(column[i] == l_value(Complex(sigmas[i], 123.4), chi));
}

TEST_CASE("truncated Euler product") {
  CHECK(std::abs(l_truncated(Complex(2.0, 0.0), kZeta, 2.0) - 4.0 / 3.0) < 1e-15);
  for (Complex s : {Complex(0.7, 1.0), Complex(2.0, -5.0)}) CHECK(l_truncated(s, kChi4, 2.0) == Complex(1.0, 0.0));

  // |L_v - L| <= C sum_{p > v} p^{-2} with C = 1.05 zeta(2) once v >= 100.
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  double previous = 1e300;
  for (double v : {100.0, 1000.0, 10000.0, 100000.0}) {
    double tail = 0.0;
    for (auto p : primes_up_to(1e6)) if (p > v) tail += 1.0 / (double(p) * double(p));
    tail += 1.0 / 1e6;  // crude remainder past the table
    for (const auto& chi : {kZeta, kChi4, parse_character("5:2")}) {
      const Complex s(2.0, 7.0);
      const double err = std::abs(l_truncated(s, chi, v) - l_value(s, chi));
      CHECK(err <= 1.05 * zeta2 * tail);
    }
    const double err0 = std::abs(l_truncated(Complex(2.0, 0.0), kZeta, v) - zeta2);
    CHECK(err0 < previous);
    previous = err0;
  }
}

TEST_CASE("log of the truncated ratio") {
  CHECK(log_l_truncated_ratio(Complex(0.7, 3.0), kChi4, 50.0, 50.0) == Complex(0.0, 0.0));
  const Complex single = log_l_truncated_ratio(Complex(2.0, 0.0), kZeta, 2.0, 3.0);
  CHECK(std::abs(single - (-std::log(1.0 - 1.0 / 9.0))) < 1e-15);
  CHECK(single.real() == doctest::Approx(0.117783035656383).epsilon(1e-13));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> sig(0.55, 2.0);
  std::uniform_real_distribution<double> tee(-100.0, 100.0);
  std::uniform_real_distribution<double> vee(2.0, 60.0);
  std::uniform_real_distribution<double> gap(0.0, 200.0);
  const std::vector<DirichletCharacter> chars{kZeta, kChi4, parse_character("5:1"), parse_character("7:2")};
  for (int i = 0; i < 100; ++i) {
    const Complex s(sig(rng), tee(rng));
    const double v = vee(rng);
    const double y = v + gap(rng);
    const auto& chi = chars[i % chars.size()];
    const Complex lhs = std::exp(log_l_truncated_ratio(s, chi, v, y)) * l_truncated(s, chi, v);
    const Complex rhs = l_truncated(s, chi, y);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("partial sums") {
  CHECK(l_partial_sum(Complex(0.7, 12.0), kChi4, 1) == Complex(1.0, 0.0));
  CHECK(l_partial_sum(Complex(2.0, 0.0), kZeta, 10).real() == doctest::Approx(1.5497677311665408).epsilon(1e-15));
  const double sigma = 1.5;
  const Complex full = l_value(Complex(sigma, 0.0), kZeta);
  for (std::uint64_t N : {10ULL, 100ULL, 1000ULL, 10000ULL}) {
    const double bound = std::pow(double(N), 1.0 - sigma) / (sigma - 1.0);
    CHECK(std::abs(full - l_partial_sum(Complex(sigma, 0.0), kZeta, N)) <= bound);
  }
}

TEST_CASE("prime zeta tail") {
  // P(2) from the prime table plus the tail bound sum_{p > X} p^{-2} < 1/(X log X) for large X.
  double direct = 0.0;
  for (auto p : primes_up_to(1e6)) direct += 1.0 / (double(p) * double(p));
  const double full = prime_zeta_tail(2.0, 0.0);
  CHECK(full - direct > 0.0);
  CHECK(full - direct < 1.0 / (1e6 * std::log(1e6)));
  CHECK(full == doctest::Approx(0.45224742004106549850).epsilon(1e-14));
  CHECK(prime_zeta_tail(2.0, 3.0) == doctest::Approx(full - 0.25 - 1.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(prime_zeta_tail(1.0, 2.0), DomainError);
}

TEST_CASE("strip region geometry") {
  StripRegion r;
  CHECK_NOTHROW(r.validate());
  CHECK(r.sigmas().size() == 5);
  CHECK(r.refined().grid_sigma == 9);
  r.margin = 0.2;
  CHECK_THROWS_AS(r.validate(), DomainError);
  StripRegion point{0.7, 0.7, 0.0, 0.0, 0.1, 1, 1};
  CHECK_NOTHROW(point.validate());
  CHECK(point.sigmas() == std::vector<double>{0.7});
}
