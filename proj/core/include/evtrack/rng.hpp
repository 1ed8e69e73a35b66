#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evtrack {

__extension__ using Uint128 = unsigned __int128;

/// mt19937_64 with hand-written distributions. The standard distribution
/// classes are implementation-defined, so their output would differ between
/// standard libraries; these do not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n) {
    // Lemire's multiply-and-reject.
    Uint128 m = static_cast<Uint128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<Uint128>(engine_()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform01() < p;
  }

  /// Knuth's product method, applied in chunks so exp(-mean) never underflows.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = mean > 500.0 ? 500.0 : mean;
      mean -= chunk;
      const double limit = std::exp(-chunk);
      double prod = uniform01();
      while (prod > limit) {
        ++total;
        prod *= uniform01();
      }
    }
    return total;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evtrack
