#pragma once

#include <cstdint>
#include <random>

namespace qwpde::rng {

/// Engine output mapped to [0, 1) with an explicit 53-bit scale. The
/// mt19937_64 engine is bit-exact across standard libraries; the scaling
/// keeps the draw sequence identical too (std::uniform_real_distribution is
/// implementation-defined).
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& engine, double lo, double hi) {
  return lo + (hi - lo) * uniform01(engine);
}

/// splitmix64 step; decorrelates per-model / per-purpose seed streams derived
/// from one run seed.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace qwpde::rng
