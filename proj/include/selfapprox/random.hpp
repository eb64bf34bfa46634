#pragma once

#include <cstdint>

namespace selfapprox {

// Counter-based randomness. Every random draw is a pure function of
// (master seed, stream id, counter), so a sample's value does not depend on
// which thread produced it or on how work was partitioned.
//
//   key(seed, stream) = mix64(seed ^ mix64(stream + gamma))
//   bits(seed, stream, i) = mix64(key + (i + 1) * gamma)
//
// mix64 is the SplitMix64 finalizer and gamma = 0x9E3779B97F4A7C15, so
// bits(seed, stream, i) is output i of a SplitMix64 generator seeded with key.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + kGoldenGamma));
}

constexpr std::uint64_t random_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return mix64(stream_key(seed, stream) + (counter + 1) * kGoldenGamma);
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double random_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(random_bits(seed, stream, counter) >> 11U) * 0x1.0p-53;
}

/// Stream ids used by the library; distinct purposes never share a stream.
namespace streams {
inline constexpr std::uint64_t kTauSamples = 1;
inline constexpr std::uint64_t kStratifiedOffset = 2;
inline constexpr std::uint64_t kLadderBase = 1000;  // + ladder position
}  // namespace streams

}  // namespace selfapprox
