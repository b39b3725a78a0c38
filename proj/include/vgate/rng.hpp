#pragma once

#include <cstdint>
#include <random>

namespace vgate {

/// splitmix64: tiny, high-quality 64-bit mixer. Used to derive independent
/// sub-seeds from a user seed (trial index, flux-point index, ...) so that
/// parallel work items get decorrelated, *reproducible* streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Derive the k-th sub-seed of a root seed, independent of any other k.
inline std::uint64_t subseed(std::uint64_t root, std::uint64_t k) {
    std::uint64_t s = root ^ (0xA5A5A5A5A5A5A5A5ull + k * 0x9E3779B97F4A7C15ull);
    splitmix64(s);
    return splitmix64(s);
}

/// All stochastic operations draw from an explicitly seeded engine; nothing
/// in the library touches global RNG state.
inline std::mt19937_64 seeded_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace vgate
