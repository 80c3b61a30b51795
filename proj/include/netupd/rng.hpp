#pragma once

#include <cstdint>
#include <random>

namespace netupd {

/// Deterministic random source. All draws are derived from the raw 64-bit
/// stream with fixed arithmetic, so identical seeds give identical instances
/// everywhere (standard-library distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform on the open interval (lo, hi): endpoints are re-drawn.
  double uniform(double lo, double hi) {
    while (true) {
      double u = static_cast<double>(bits() >> 11) * 0x1.0p-53;  // [0, 1)
      double x = lo + u * (hi - lo);
      if (x > lo && x < hi) return x;
    }
  }

  /// Uniform integer in [lo, hi], rejection-sampled.
  int uniform_int(int lo, int hi) {
    std::uint64_t n = static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = bits();
    } while (x >= limit);
    return lo + static_cast<int>(x % n);
  }

  bool coin() { return bits() & 1; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace netupd
