#pragma once

#include <cstdint>

namespace kslab {

// Stateless counter-based generator: every draw is a pure function of
// (seed, round, stream), so rounds can be simulated in any order or on any
// thread and still give identical results. The mixer is SplitMix64's
// finalizer applied to a combined 64-bit counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x5851F42D4C957F2DULL)) {}

  std::uint64_t bits(std::uint64_t round, std::uint32_t stream) const {
    return mix(key_ ^ mix(round * 0x9E3779B97F4A7C15ULL + stream));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t round, std::uint32_t stream) const {
    return static_cast<double>(bits(round, stream) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) by multiply-shift on the top 32 bits.
  std::uint32_t below(std::uint64_t round, std::uint32_t stream, std::uint32_t n) const {
    return static_cast<std::uint32_t>(((bits(round, stream) >> 32) * n) >> 32);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace kslab
