#pragma once

#include <cstdint>
#include <random>

namespace steap::runtime {

/// Portable random stream: the 64-bit Mersenne Twister (bit-exact across
/// standard libraries) with our own conversions to doubles, since the standard
/// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream `index` of a run seed (splitmix64 of both).
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal by Box-Muller; no cached second value, so draws stay in lockstep.
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace steap::runtime
