#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace detkdpp {

// Seeded 64-bit engine. Uniform draws are derived from raw engine output so
// sequences are identical across standard library implementations
// (std::uniform_*_distribution is not specified bit-exactly).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  double normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Stream-splitting rule used by the benchmark: trial t of a run seeded with
// base draws from base + 1000 * t.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
  return base + 1000 * trial;
}

}  // namespace detkdpp
