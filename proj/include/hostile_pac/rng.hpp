#pragma once

#include <cstdint>
#include <random>

namespace hostile_pac {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds from a root.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for stream `index` under `root`, tagged by `purpose` so that e.g. the
// training-data streams and the Monte Carlo risk-oracle streams never collide.
constexpr std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index,
                                    std::uint64_t purpose = 0) noexcept {
    return mix_seed(mix_seed(mix_seed(root) ^ index) ^ (purpose * 0xd1b54a32d192ed03ULL));
}

namespace stream {
inline constexpr std::uint64_t data = 1;
inline constexpr std::uint64_t oracle = 2;
inline constexpr std::uint64_t probes = 3;
inline constexpr std::uint64_t prior = 4;
} // namespace stream

inline Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

} // namespace hostile_pac
