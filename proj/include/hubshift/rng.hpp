#pragma once

#include <cstdint>
#include <random>

namespace hubshift::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; decorrelates nearby seeds
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent child seed for (master, stream). Parallel workers get identical
// streams regardless of scheduling because every unit of work derives its own
// engine this way.
inline std::uint64_t substream(std::uint64_t master, std::uint64_t stream) {
    return mix(master ^ mix(stream));
}

inline double uniform01(Engine& eng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng);
}

inline double uniform(Engine& eng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
}

inline std::size_t uniform_index(Engine& eng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng);
}

inline double normal(Engine& eng, double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(eng);
}

}  // namespace hubshift::rng
