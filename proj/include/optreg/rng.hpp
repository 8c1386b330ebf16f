#pragma once

#include <cstdint>
#include <random>

namespace optreg {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream `stream` of seed `base`: splitmix64(splitmix64(base) ^ stream·φ).
/// Replicate i of a run with master seed s uses derive_seed(s, i); components
/// inside one replicate use derive_seed(replicate_seed, k) for small fixed k.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ (stream * 0x9E3779B97F4A7C15ULL));
}

using Engine = std::mt19937_64;

}  // namespace optreg
