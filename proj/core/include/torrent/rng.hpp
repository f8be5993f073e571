#pragma once

#include <cstdint>
#include <vector>

#include "torrent/common.hpp"

namespace torrent {

// Deterministic, platform-independent sampling stream built on splitmix64.
// All generators used for data synthesis derive from this class so that a
// 64-bit seed pins every draw exactly, independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // [0, 1)
  double uniform01();
  double uniform(double lo, double hi);

  // N(0, 1) via Box-Muller.
  double gaussian();

  // Uniform in [0, n), rejection-sampled to avoid modulo bias.
  Index uniform_index(Index n);

  // Uniform random k-subset of [0, n), returned sorted ascending.
  std::vector<Index> sample_without_replacement(Index n, Index k);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless seed derivation for independent sub-streams (one per generated
// component), so varying one knob never perturbs the draws of another.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b);

}  // namespace torrent
