#include "selfapprox/primes.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "selfapprox/errors.hpp"

namespace selfapprox {

namespace {

const std::vector<std::uint32_t>& prime_table() {
  static const std::vector<std::uint32_t> table = [] {
    std::vector<bool> composite(kPrimeTableBound + 1, false);
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= kPrimeTableBound; ++i) {
      if (composite[i]) continue;
      primes.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= kPrimeTableBound; j += i) composite[j] = true;
    }
    return primes;
  }();
  return table;
}

}  // namespace

std::span<const std::uint32_t> primes_up_to(double bound) {
  if (!(bound <= static_cast<double>(kPrimeTableBound))) {
    throw RangeError("prime bound " + std::to_string(bound) + " exceeds prime table limit " +
                     std::to_string(kPrimeTableBound));
  }
  const auto& table = prime_table();
  const auto end = std::upper_bound(table.begin(), table.end(), std::floor(bound),
                                    [](double b, std::uint32_t p) { return b < static_cast<double>(p); });
  return {table.data(), static_cast<std::size_t>(end - table.begin())};
}

}  // namespace selfapprox
