#pragma once

#include <cstdint>
#include <span>

namespace selfapprox {

/// Upper limit of the shared prime table.
inline constexpr std::uint64_t kPrimeTableBound = 1'000'000;

/// Primes p <= bound, ascending, from a sieve built once on first use (thread-safe).
/// Throws RangeError when bound exceeds kPrimeTableBound.
std::span<const std::uint32_t> primes_up_to(double bound);

/// Number of primes <= bound.
inline std::size_t prime_count(double bound) { return primes_up_to(bound).size(); }

}  // namespace selfapprox
