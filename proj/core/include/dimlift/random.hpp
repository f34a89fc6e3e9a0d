#pragma once

#include <cstdint>
#include <random>

namespace dimlift {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; stable across platforms and releases.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a base seed and a stream index
/// (window time, channel row, layer number ...).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                          std::uint64_t substream) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace dimlift
