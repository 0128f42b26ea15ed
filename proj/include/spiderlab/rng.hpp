#pragma once

#include <cstdint>
#include <random>

namespace spiderlab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-run seed: splitmix64 folded over (base, start index, strategy kind, repeat) in that order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t start_index, std::uint64_t strategy_index,
                                 std::uint64_t repeat_index) {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ start_index);
    h = splitmix64(h ^ (strategy_index + 0x100));
    h = splitmix64(h ^ (repeat_index + 0x10000));
    return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace spiderlab
