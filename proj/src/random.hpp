#pragma once

#include <cstdint>

namespace gevreg {

/// Seed of stream b: the SplitMix64 finaliser applied to
/// seed + (b + 1) * 0x9E3779B97F4A7C15. Independent of evaluation order.
[[nodiscard]] constexpr std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t b) noexcept {
  std::uint64_t z = seed + (b + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform on [0, 1) from the top 53 bits of a 64-bit draw.
[[nodiscard]] constexpr double unit_uniform(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace gevreg
