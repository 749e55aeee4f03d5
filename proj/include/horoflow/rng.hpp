#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "horoflow/errors.hpp"

namespace horoflow {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the stream owned by one trial. Trials never share a stream, so any
// execution order reproduces the same numbers.
inline constexpr std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
  return splitmix64(master_seed ^ trial);
}

inline constexpr const char* kGeneratorName = "mt19937_64 seeded by splitmix64(master_seed ^ trial)";

// Portable stream: std::mt19937_64 output is fixed by the standard, and the
// conversions below are written out instead of using <random> distributions,
// whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., count - 1}.
  std::size_t index(std::size_t count) {
    if (count == 0) throw InputError("Rng::index: empty range");
    const std::uint64_t n = count;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r = engine_();
    while (r >= limit) r = engine_();
    return static_cast<std::size_t>(r % n);
  }

  double normal() {
    // Box-Muller; one variate per call keeps the stream position predictable.
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double cauchy() { return std::tan(std::numbers::pi * (uniform() - 0.5)); }

  bool coin() { return (engine_() >> 63) != 0; }

  // Index drawn with the given probability weights (need not be normalized).
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double target = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (target < acc) return i;
    }
    return weights.size() - 1;
  }

  std::vector<double> normal_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace horoflow
