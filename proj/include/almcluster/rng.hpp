#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace almcluster {

/// splitmix64 finalizer; the sole mixing primitive of the scenario RNG.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream: draw i of stream (seed, stream_id) is
/// mix64(key + i * gamma), a pure function of its coordinates. Substreams
/// keyed by scenario index are therefore independent of generation order and
/// identical on every machine, which is what lets workers regenerate just
/// their own scenario range.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_id)
      : key_(mix64(seed ^ mix64(stream_id ^ 0x5851f42d4c957f2dULL))) {}

  /// Uniform draw in (0, 1]; never 0 so log() stays finite.
  double next_unit() {
    const std::uint64_t bits = mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniform draws.
  double next_normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace almcluster
