#pragma once

#include <cstdint>
#include <random>

namespace slicesim {

using Rng = std::mt19937_64;

// Independent, reproducible stream `stream` derived from a run seed.
inline Rng make_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  return Rng(seq);
}

enum Stream : std::uint32_t {
  kTrafficStream = 1,
  kPolicyStream = 2,
  kHeuristicStream = 3,
  kInitStream = 4,
};

}  // namespace slicesim
