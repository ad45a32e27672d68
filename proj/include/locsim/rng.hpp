#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace locsim {

/// Seedable random stream with cheap derivation of independent substreams.
///
/// stream(id) depends only on (root seed, id), never on how much the parent
/// stream has been consumed, so trial k always sees the same draws no matter
/// how many trials run or in which order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed), engine_(mix(seed)) {}

  Rng stream(std::uint64_t id) const {
    return Rng(mix(root_ + 0x9E3779B97F4A7C15ull * (id + 1)));
  }

  std::uint64_t bits() { return engine_(); }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double normal(double stddev) {
    return std::normal_distribution<double>(0.0, stddev)(engine_);
  }

  /// Circularly symmetric complex Gaussian, mean 0, total variance `variance`
  /// (each of the real and imaginary parts carries variance/2).
  std::complex<double> complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal(s);
    const double im = normal(s);
    return {re, im};
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t root_;
  std::mt19937_64 engine_;
};

}  // namespace locsim
