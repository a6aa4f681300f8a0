#pragma once

// Splittable counter-based random number generator. Streams are keyed by
// (seed, stream) so that independent sample indices can be generated in
// any order, or in parallel, with identical results.

#include <cstdint>

namespace pss {

class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(mix(seed) ^ mix(stream ^ 0xb5297a4d3f84d5b3ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return finalize(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [a, b).
  double next_in(double a, double b) { return a + (b - a) * next_double(); }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t mix(std::uint64_t z) {
    return finalize(z + 0x9e3779b97f4a7c15ULL);
  }

  std::uint64_t state_;
};

}  // namespace pss
