#pragma once

#include <cstdint>
#include <random>

namespace locid {

using Rng = std::mt19937_64;

// Independent stream for draw `index` under `seed`; results do not depend on
// the order in which draws are evaluated.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x6c6f6369u};
  return Rng(seq);
}

inline double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace locid
