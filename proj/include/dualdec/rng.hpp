#pragma once

#include <cstdint>

namespace dualdec {

/// One round of the splitmix64 output function.  Used both as the generator
/// step and as the mixing function when deriving substream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a substream key from (seed, a, b).  Distinct (a, b) pairs give
/// statistically independent streams for the same seed; the map is a fixed
/// function of the inputs, so replays are bit-identical.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                      std::uint64_t b) {
  return mix64(mix64(mix64(seed) ^ a) ^ b);
}

/// Minimal splitmix64 generator.  The standard <random> distributions are
/// implementation-defined, so all stochastic pieces draw through this to keep
/// runs reproducible bit-for-bit across toolchains.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform draw in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform draw in [-c, c).
  double uniform_symmetric(double c) { return c * (2.0 * uniform01() - 1.0); }

 private:
  std::uint64_t state_;
};

}  // namespace dualdec
