#pragma once

#include <cstdint>

namespace zinpaint {

// Deterministic RNG used everywhere seeds appear: xoshiro256** seeded via
// splitmix64. std::uniform_real_distribution would tie reproducibility to
// standard-library internals, so uniforms are derived from raw 64-bit draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53 random bits.
  double uniform();
  // Uniform in [a, b).
  double uniform(double a, double b);
  // Uniform integer in [0, n), n >= 1.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller.
  double normal();

  // Deterministically derives an independent stream seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace zinpaint
