#pragma once

#include <cstdint>
#include <random>

namespace gehm {

using Rng = std::mt19937_64;

/// Labels for the independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
  graph_gen = 1,
  node_noise = 2,
  ou_noise = 3,
  spectral_init = 4,
  initial_state = 5,
};

/// Counter-based substream seed: a splitmix64 hash of (master, label, index).
/// Identical inputs always give the same seed, and distinct labels or indices
/// give statistically unrelated engines.
std::uint64_t derive_seed(std::uint64_t master, Stream label, std::uint64_t index = 0) noexcept;

inline Rng make_rng(std::uint64_t master, Stream label, std::uint64_t index = 0) {
  return Rng(derive_seed(master, label, index));
}

}  // namespace gehm
