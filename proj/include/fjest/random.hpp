#pragma once

#include <cstdint>

namespace fjest {

// Deterministic 64-bit random stream (SplitMix64). Streams are cheap value
// types; `derive` hashes lane indices into the seed so that every
// (target, walk) pair owns an independent stream regardless of scheduling,
// which keeps parallel estimators bitwise reproducible.
class RandomStream {
 public:
  RandomStream() : state_(mix(kGamma)) {}
  explicit RandomStream(std::uint64_t seed) : state_(mix(seed + kGamma)) {}

  static RandomStream derive(std::uint64_t seed, std::uint64_t lane) {
    RandomStream s;
    s.state_ = mix(mix(seed + kGamma) + lane);
    return s;
  }

  static RandomStream derive(std::uint64_t seed, std::uint64_t lane_a,
                             std::uint64_t lane_b) {
    RandomStream s;
    s.state_ = mix(mix(mix(seed + kGamma) + lane_a) + lane_b);
    return s;
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n); exact (multiply-shift with rejection).
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = -n % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace fjest
