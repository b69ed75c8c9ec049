#pragma once

#include <cstdint>
#include <random>

#include "hdsched/numeric.hpp"

namespace hdsched {

// Deterministic uniform stream.  Identical seeds produce identical draws on
// every platform (mt19937_64 output is specified bit for bit).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Seed for shard `shard` of a run keyed by `seed`.
inline std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) {
  return splitmix64(seed ^ splitmix64(shard + 1));
}

}  // namespace hdsched
