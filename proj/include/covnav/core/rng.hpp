#pragma once

#include <cstdint>

namespace covnav {

// Deterministic PRNG (xoshiro256++ seeded via splitmix64). Standard-library
// distributions are implementation-defined, so all sampling goes through
// this type to keep runs bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed);

  uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n);
  // Standard normal via Box-Muller, spare value cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Derive an independent stream for a sub-component (env index, agent
  // index, ...). Pure function of (state seed, tag): re-derivable.
  static uint64_t derive(uint64_t seed, uint64_t tag);

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace covnav
