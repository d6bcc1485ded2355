// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace ricnn {

/// splitmix64 step; used to decorrelate seeds derived from a common base.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic per-(stream, salt) seed. Every random draw in the engine
/// flows from one of the four named config seeds through this function.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(splitmix64(base) ^ splitmix64(salt + 0x5851F42D4C957F2DULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

/// The four independent random streams named in a run config.
struct Seeds {
  std::uint64_t net_init = 1;
  std::uint64_t dropout = 2;
  std::uint64_t shuffle = 3;
  std::uint64_t synthetic = 4;
};

}  // namespace ricnn
