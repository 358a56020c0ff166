// random.hpp - seeded generators and counter-based seed derivation.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace ddstc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for sub-stream `index` of `master`. For a fixed master the map
/// index -> seed is injective (odd-multiplier walk followed by a bijection).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
    return mix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

/// Circularly symmetric complex Gaussian with total variance `variance`.
inline std::complex<double> complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    const double s = std::sqrt(variance / 2.0);
    const double re = nd(rng);
    const double im = nd(rng);
    return {s * re, s * im};
}

} // namespace ddstc
