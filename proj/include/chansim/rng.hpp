#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace chansim {

// Counter-based generator with a fixed cross-platform bit stream. All
// randomness in the toolkit flows through this type so that reports are
// reproducible from a single seed regardless of compiler or libc.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t r;
    do {
      r = next();
    } while (r < reject_below);
    return r % bound;
  }

  // Standard normal via Box-Muller (portable, no std::normal_distribution).
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable sub-seed derivation: hash(seed, component tag, index). Components
// draw from independent streams even when they share the user-facing seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t index = 0) {
  SplitMix64 mix(seed ^ fnv1a64(tag));
  std::uint64_t h = mix.next();
  SplitMix64 mix2(h + 0x9e3779b97f4a7c15ULL * (index + 1));
  return mix2.next();
}

}  // namespace chansim
