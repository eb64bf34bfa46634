#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace selfapprox {

/// A root of unity e^{2 pi i num/den} kept as an exact rational angle.
/// den == 0 encodes the value 0 (non-unit residue).
struct RootOfUnity {
  std::uint32_t num = 0;
  std::uint32_t den = 1;

  [[nodiscard]] bool is_zero() const { return den == 0; }
  [[nodiscard]] std::complex<double> to_complex() const;
  friend bool operator==(const RootOfUnity&, const RootOfUnity&) = default;
};

/// One cyclic factor of (Z/qZ)^*: residues mod `modulus` generated by `generator` of `order`.
/// The factors of a 2-power modulus 2^e (e >= 3) are <-1> and <5>.
struct UnitGroupFactor {
  std::uint64_t prime = 0;
  std::uint64_t modulus = 0;  // prime power p^e
  std::uint64_t generator = 0;
  std::uint64_t order = 0;
};

/// Dirichlet character mod q, immutable after construction.
///
/// A character is fixed by the exponents it assigns to the generators of the
/// cyclic factors of (Z/qZ)^*: chi(g_i) = e^{2 pi i j_i / n_i}. Characters are
/// indexed lexicographically by (j_1, ..., j_r), so index 0 is principal.
class DirichletCharacter {
 public:
  DirichletCharacter(std::uint64_t modulus, std::uint64_t index, std::vector<std::uint64_t> exponents,
                     std::vector<RootOfUnity> values);

  [[nodiscard]] std::uint64_t modulus() const { return modulus_; }
  [[nodiscard]] std::uint64_t index() const { return index_; }
  [[nodiscard]] std::uint64_t order() const { return order_; }
  [[nodiscard]] bool principal() const { return order_ == 1; }
  [[nodiscard]] bool real_valued() const { return order_ <= 2; }
  [[nodiscard]] const std::vector<std::uint64_t>& exponents() const { return exponents_; }

  /// Exact value at a residue 0..q-1 (residue 0 stands for q).
  [[nodiscard]] const RootOfUnity& exact(std::uint64_t residue) const { return values_[residue]; }
  /// Complex values indexed by residue 0..q-1.
  [[nodiscard]] const std::vector<std::complex<double>>& table() const { return table_; }

  /// chi(n) for any integer n.
  [[nodiscard]] std::complex<double> operator()(std::int64_t n) const;

  /// "q:index"
  [[nodiscard]] std::string id() const;

  friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
    return a.modulus_ == b.modulus_ && a.values_ == b.values_;
  }

 private:
  std::uint64_t modulus_;
  std::uint64_t index_;
  std::uint64_t order_ = 1;
  std::vector<std::uint64_t> exponents_;
  std::vector<RootOfUnity> values_;
  std::vector<std::complex<double>> table_;
};

std::uint64_t euler_phi(std::uint64_t n);

/// Prime factorization by trial division, ascending primes.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

/// Cyclic decomposition of (Z/qZ)^* in the order used for character indexing.
std::vector<UnitGroupFactor> unit_group_factors(std::uint64_t q);

/// All phi(q) characters mod q in lexicographic exponent order. Throws DomainError for q = 0.
std::vector<DirichletCharacter> enumerate_characters(std::uint64_t q);

/// The character with the given lexicographic index mod q.
DirichletCharacter make_character(std::uint64_t q, std::uint64_t index);

/// Parses "q:index" (e.g. "4:1"). Throws ConfigError on malformed or out-of-range ids.
DirichletCharacter parse_character(std::string_view id);

inline std::complex<double> char_value(const DirichletCharacter& chi, std::int64_t n) { return chi(n); }

}  // namespace selfapprox
