#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qamp {

// splitmix64 output function. Used to derive independent seed streams from a
// master seed: stream k gets splitmix64(master + (k+1) * golden_gamma).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Deterministic random source. Uniform and normal draws are generated with
// fixed algorithms (53-bit mantissa uniforms, Box-Muller normals) on top of
// mt19937_64, so a given seed produces the same stream on every platform;
// std::*_distribution is avoided because its algorithm is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on [0, n), n >= 1. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);
  // Standard normal, Box-Muller. Draws two uniforms per pair; the second
  // value is cached, so every call consumes the stream deterministically.
  double normal();
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates permutation of {0, ..., n-1}. Uses Rng::below so the result
// depends only on the seed stream, not on std::shuffle internals.
std::vector<int> shuffled_indices(int n, Rng& rng);

}  // namespace qamp
