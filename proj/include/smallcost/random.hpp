#pragma once

#include <cstdint>
#include <random>

namespace smallcost {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic per-path generator derived from a master seed, so that paths
/// can be generated in any order (or concurrently) with identical output.
inline std::mt19937_64 rng_for_path(std::uint64_t master_seed, std::uint64_t path_index) {
    return std::mt19937_64(splitmix64(master_seed ^ splitmix64(path_index + 1)));
}

}  // namespace smallcost
