#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <numeric>
#include <random>
#include <set>

#include "selfapprox/characters.hpp"
#include "selfapprox/errors.hpp"

using namespace selfapprox;

namespace {
bool near(std::complex<double> a, std::complex<double> b, double tol = 1e-12) { return std::abs(a - b) < tol; }
}  // namespace

TEST_CASE("modulus zero is a domain error") {
  CHECK_THROWS_AS(enumerate_characters(0), DomainError);
  CHECK_THROWS_AS(make_character(0, 0), DomainError);
}

TEST_CASE("q = 1 has the single trivial character") {
  const auto chars = enumerate_characters(1);
  REQUIRE(chars.size() == 1);
  CHECK(chars[0].principal());
  for (int n = -5; n < 20; ++n) CHECK(chars[0](n) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("q = 4 characters") {
  const auto chars = enumerate_characters(4);
  REQUIRE(chars.size() == 2);
  CHECK(chars[0].principal());
  const auto& chi = chars[1];
  CHECK_FALSE(chi.principal());
  CHECK(chi(1) == std::complex<double>(1.0, 0.0));
  CHECK(chi(3) == std::complex<double>(-1.0, 0.0));
  CHECK(chi(7) == std::complex<double>(-1.0, 0.0));
  for (int n : {0, 2, 4, 6, 100}) CHECK(chi(n) == std::complex<double>(0.0, 0.0));
  CHECK(chi.id() == "4:1");
  CHECK(parse_character("4:1") == chi);
}

TEST_CASE("q = 5 characters have order dividing 4 and values in {0, +-1, +-i}") {
  const auto chars = enumerate_characters(5);
  REQUIRE(chars.size() == 4);
  for (const auto& chi : chars) {
    CHECK(4 % chi.order() == 0);
    for (int n = 0; n < 5; ++n) {
      const auto v = chi(n);
      const bool ok = v == std::complex<double>(0, 0) || v == std::complex<double>(1, 0) ||
                      v == std::complex<double>(-1, 0) || v == std::complex<double>(0, 1) ||
                      v == std::complex<double>(0, -1);
      CHECK(ok);
    }
  }
  CHECK(chars[0](12) == std::complex<double>(1.0, 0.0));
  CHECK(chars[0](10) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("values vanish exactly on non-units") {
  for (std::uint64_t q : {6ULL, 8ULL, 9ULL, 12ULL, 30ULL, 64ULL, 105ULL}) {
    for (const auto& chi : enumerate_characters(q)) {
      for (std::uint64_t n = 0; n < 2 * q; ++n) {
        const bool unit = std::gcd(n, q) == 1;
        CHECK((std::abs(chi(static_cast<std::int64_t>(n))) == 0.0) == !unit);
        if (unit) CHECK(std::abs(std::abs(chi(static_cast<std::int64_t>(n))) - 1.0) < 1e-15);
      }
      CHECK(chi(static_cast<std::int64_t>(q)) == std::complex<double>(q == 1 ? 1.0 : 0.0, 0.0));
    }
  }
}

TEST_CASE("count, distinctness, principal uniqueness, orthogonality for q <= 200") {
  for (std::uint64_t q = 1; q <= 200; ++q) {
    const auto chars = enumerate_characters(q);
    REQUIRE(chars.size() == euler_phi(q));
    std::set<std::vector<std::pair<std::uint32_t, std::uint32_t>>> tables;
    int principal = 0;
    for (const auto& chi : chars) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> key;
      for (std::uint64_t r = 0; r < q; ++r) key.emplace_back(chi.exact(r).num, chi.exact(r).den);
      tables.insert(key);
      if (chi.principal()) ++principal;
      if (!chi.principal()) {
        std::complex<double> sum;
        for (std::uint64_t n = 1; n <= q; ++n) sum += chi(static_cast<std::int64_t>(n));
        CHECK(std::abs(sum) < 1e-12);
      }
      CHECK(chi(1) == std::complex<double>(1.0, 0.0));
    }
    CHECK(tables.size() == chars.size());
    CHECK(principal == 1);
    CHECK(chars.front().principal());
  }
}

TEST_CASE("complete multiplicativity and periodicity fuzz") {
  std::mt19937_64 rng(20240521);
  std::uniform_int_distribution<std::uint64_t> qdist(1, 200);
  std::uniform_int_distribution<std::int64_t> ndist(-100000, 100000);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto q = qdist(rng);
    const auto chi = make_character(q, rng() % euler_phi(q));
    const auto m = ndist(rng);
    const auto n = ndist(rng);
    CHECK(near(chi(m * n), chi(m) * chi(n)));
    CHECK(chi(n + static_cast<std::int64_t>(q)) == chi(n));
  }
}

TEST_CASE("unit group factors follow the 2-adic {-1, 5} convention") {
  const auto f = unit_group_factors(16);
  REQUIRE(f.size() == 2);
  CHECK(f[0].generator == 15);
  CHECK(f[0].order == 2);
  CHECK(f[1].generator == 5);
  CHECK(f[1].order == 4);
  const auto g = unit_group_factors(9);
  REQUIRE(g.size() == 1);
  CHECK(g[0].order == 6);
}

TEST_CASE("character ids") {
  CHECK_THROWS_AS(parse_character("4"), ConfigError);
  CHECK_THROWS_AS(parse_character("4:2"), ConfigError);
  CHECK_THROWS_AS(parse_character("x:1"), ConfigError);
  CHECK_THROWS_AS(parse_character("0:0"), ConfigError);
  CHECK(parse_character("12:3").id() == "12:3");
}
