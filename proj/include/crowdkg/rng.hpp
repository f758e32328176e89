#pragma once

#include <cstdint>
#include <random>

namespace crowdkg {

// Seedable random source with a fully specified output sequence.
//
// std::mt19937_64's raw output is pinned by the standard, so traces produced
// with the same seed are identical on every platform. The std::*_distribution
// adaptors are *not* pinned, which is why the draws below are implemented
// directly on the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1): 53 random mantissa bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n-1}. Modulo bias is below 2^-60 for any n that
  // fits in a simulation, far under statistical resolution.
  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  bool bernoulli(double p) { return next_double() < p; }

  // Deterministic derived seed for an auxiliary stream (policy randomness,
  // data generation, ...) that must not perturb the parent stream.
  static std::uint64_t mix(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crowdkg
