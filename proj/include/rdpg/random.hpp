#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rdpg {

// Explicitly seeded generator used by every sampler in the library.
//
// std::mt19937_64's output sequence is fixed by the standard, and the draws
// below avoid the implementation-defined std::*_distribution algorithms, so
// any experiment is replayable bit-for-bit from its seed, on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller. No cached spare draw, so the consumed
  // stream length per call is fixed.
  double normal() {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rdpg
