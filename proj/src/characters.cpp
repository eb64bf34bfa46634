#include "selfapprox/characters.hpp"

#include <charconv>
#include <numbers>
#include <numeric>

#include "selfapprox/errors.hpp"

namespace selfapprox {

namespace {

constexpr std::uint64_t kMaxModulus = 10'000'000;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

std::uint64_t primitive_root_mod_prime(std::uint64_t p) {
  if (p == 2) return 1;
  const auto factors = factorize(p - 1);
  for (std::uint64_t g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& [r, e] : factors) {
      if (powmod(g, (p - 1) / r, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw DomainError("no primitive root found");  // unreachable for prime p
}

// Discrete logarithms for one prime-power block: residue mod p^e -> exponents of that block's factors.
struct BlockLog {
  std::uint64_t modulus = 1;
  std::size_t first_factor = 0;
  std::size_t factor_count = 0;
  std::vector<std::uint64_t> log;  // factor_count entries per residue, flattened
};

std::vector<BlockLog> build_block_logs(std::uint64_t q, const std::vector<UnitGroupFactor>& factors) {
  std::vector<BlockLog> blocks;
  std::size_t f = 0;
  for (const auto& [p, e] : factorize(q)) {
    BlockLog block;
    block.modulus = 1;
    for (unsigned i = 0; i < e; ++i) block.modulus *= p;
    block.first_factor = f;
    while (f < factors.size() && factors[f].prime == p) ++f;
    block.factor_count = f - block.first_factor;
    block.log.assign(block.modulus * block.factor_count, 0);
    if (block.factor_count == 1) {
      const auto& fac = factors[block.first_factor];
      std::uint64_t x = 1;
      for (std::uint64_t k = 0; k < fac.order; ++k) {
        block.log[x] = k;
        x = mulmod(x, fac.generator, block.modulus);
      }
    } else if (block.factor_count == 2) {
      // 2^e with e >= 3: u = (-1)^a 5^b
      const auto& five = factors[block.first_factor + 1];
      std::uint64_t x = 1;
      for (std::uint64_t b = 0; b < five.order; ++b) {
        block.log[2 * x] = 0;
        block.log[2 * x + 1] = b;
        const std::uint64_t neg = block.modulus - x;
        block.log[2 * neg] = 1;
        block.log[2 * neg + 1] = b;
        x = mulmod(x, 5, block.modulus);
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace

std::complex<double> RootOfUnity::to_complex() const {
  if (den == 0) return {0.0, 0.0};
  const std::uint64_t quarter = 4ULL * num;
  if (quarter % den == 0) {
    switch ((quarter / den) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

DirichletCharacter::DirichletCharacter(std::uint64_t modulus, std::uint64_t index,
                                       std::vector<std::uint64_t> exponents, std::vector<RootOfUnity> values)
    : modulus_(modulus), index_(index), exponents_(std::move(exponents)), values_(std::move(values)) {
  table_.reserve(values_.size());
  for (const auto& v : values_) {
    table_.push_back(v.to_complex());
    if (!v.is_zero()) order_ = std::lcm(order_, static_cast<std::uint64_t>(v.den));
  }
}

std::complex<double> DirichletCharacter::operator()(std::int64_t n) const {
  const auto q = static_cast<std::int64_t>(modulus_);
  std::int64_t r = n % q;
  if (r < 0) r += q;
  return table_[static_cast<std::size_t>(r)];
}

std::string DirichletCharacter::id() const { return std::to_string(modulus_) + ":" + std::to_string(index_); }

std::uint64_t euler_phi(std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t result = n;
  for (const auto& [p, e] : factorize(n)) result = result / p * (p - 1);
  return result;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1U);
  return out;
}

std::vector<UnitGroupFactor> unit_group_factors(std::uint64_t q) {
  if (q == 0) throw DomainError("modulus must be positive");
  std::vector<UnitGroupFactor> factors;
  for (const auto& [p, e] : factorize(q)) {
    std::uint64_t pe = 1;
    for (unsigned i = 0; i < e; ++i) pe *= p;
    if (p == 2) {
      if (e == 2) {
        factors.push_back({2, 4, 3, 2});
      } else if (e >= 3) {
        factors.push_back({2, pe, pe - 1, 2});
        factors.push_back({2, pe, 5, pe / 4});
      }
      continue;
    }
    std::uint64_t g = primitive_root_mod_prime(p);
    if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
    factors.push_back({p, pe, g, pe / p * (p - 1)});
  }
  return factors;
}

DirichletCharacter make_character(std::uint64_t q, std::uint64_t index) {
  if (q == 0) throw DomainError("modulus must be positive");
  if (q > kMaxModulus) throw DomainError("modulus " + std::to_string(q) + " exceeds supported maximum");
  const auto phi = euler_phi(q);
  if (index >= phi) {
    throw DomainError("character index " + std::to_string(index) + " out of range for modulus " +
                      std::to_string(q));
  }
  const auto factors = unit_group_factors(q);
  std::vector<std::uint64_t> exponents(factors.size(), 0);
  std::uint64_t rest = index;
  for (std::size_t i = factors.size(); i-- > 0;) {
    exponents[i] = rest % factors[i].order;
    rest /= factors[i].order;
  }

  std::uint64_t exponent = 1;
  for (const auto& f : factors) exponent = std::lcm(exponent, f.order);

  const auto blocks = build_block_logs(q, factors);
  std::vector<RootOfUnity> values(q, RootOfUnity{0, 0});
  for (std::uint64_t u = 1; u <= q; ++u) {
    const std::uint64_t r = u % q;
    if (std::gcd(u, q) != 1) continue;
    std::uint64_t num = 0;
    for (const auto& block : blocks) {
      const std::uint64_t local = u % block.modulus;
      for (std::size_t k = 0; k < block.factor_count; ++k) {
        const auto& f = factors[block.first_factor + k];
        const std::uint64_t lg = block.log[local * block.factor_count + k];
        num = (num + mulmod(mulmod(exponents[block.first_factor + k], lg, exponent), exponent / f.order,
                            exponent)) % exponent;
      }
    }
    const std::uint64_t g = std::gcd(num, exponent);
    values[r] = RootOfUnity{static_cast<std::uint32_t>(num / g), static_cast<std::uint32_t>(exponent / g)};
  }
  return DirichletCharacter(q, index, std::move(exponents), std::move(values));
}

std::vector<DirichletCharacter> enumerate_characters(std::uint64_t q) {
  if (q == 0) throw DomainError("modulus must be positive");
  const auto phi = euler_phi(q);
  std::vector<DirichletCharacter> out;
  out.reserve(phi);
  for (std::uint64_t i = 0; i < phi; ++i) out.push_back(make_character(q, i));
  return out;
}

DirichletCharacter parse_character(std::string_view id) {
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) throw ConfigError("character id '" + std::string(id) + "' is not q:index");
  std::uint64_t q = 0;
  std::uint64_t index = 0;
  const auto qs = id.substr(0, colon);
  const auto is = id.substr(colon + 1);
  auto r1 = std::from_chars(qs.data(), qs.data() + qs.size(), q);
  auto r2 = std::from_chars(is.data(), is.data() + is.size(), index);
  if (r1.ec != std::errc{} || r1.ptr != qs.data() + qs.size() || r2.ec != std::errc{} ||
      r2.ptr != is.data() + is.size()) {
    throw ConfigError("character id '" + std::string(id) + "' is not q:index");
  }
  try {
    return make_character(q, index);
  } catch (const DomainError& e) {
    throw ConfigError("character id '" + std::string(id) + "': " + e.what());
  }
}

}  // namespace selfapprox
