#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace arecloak {

// Deterministic random source. All draws go through next_u64 and arithmetic
// that avoids std::uniform_real_distribution / std::normal_distribution,
// whose outputs are not pinned by the standard. Same seed, same platform,
// same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool coin() { return (next_u64() & 1u) != 0; }

  // Uniform index in [0, n). Modulo bias is irrelevant at these sizes
  // but rejection sampling keeps the draw exact.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= bound) x = next_u64();
    return static_cast<std::size_t>(x % n);
  }

  // Box-Muller; draws two uniforms per call, returns one variate.
  double gaussian() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::mt19937_64 engine_;
};

// Decorrelated sub-seed for stream `stream` of a base seed (splitmix64
// finalizer). Lets drivers hand independent deterministic seeds to stages.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace arecloak
