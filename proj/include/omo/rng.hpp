#pragma once

#include <cstdint>

namespace omo {

/// Deterministic 64-bit generator (splitmix64 finalizer over a Weyl
/// sequence). Every random stream in the artifact is derived from one master
/// seed via `derive`, so the draw count of one stream never perturbs another
/// (pool generation, domain sampling and probe sampling stay independent).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits; bit-for-bit reproducible.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Child seed for an independent stream. The tag is spread by an odd
  /// multiplier and pushed through the mixer, so sibling streams stay
  /// decorrelated for any tag spacing (0, 1, 2, ...).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0xA0761D6478BD642Full * (stream + 1)));
    return g.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace omo
