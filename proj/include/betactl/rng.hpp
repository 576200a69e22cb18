#pragma once

// Counter-based Gaussian noise.
//
// Every draw is a pure function of (seed, stream, index), so noise at a grid
// step can be recomputed at will and runs are reproducible bit for bit.
//
//   key      = splitmix64_mix(seed + (stream + 1) * 0x9E3779B97F4A7C15)
//   word(i)  = splitmix64_mix(key + (i + 1) * 0x9E3779B97F4A7C15)
//   uniform  = (word >> 11) * 2^-53, mapped to (0, 1] for the log argument
//   normal k = sqrt(-2 ln(1 - U(2k))) * cos(2 pi U(2k + 1))     (Box-Muller)
//
// word(i) is exactly the i-th output of a SplitMix64 generator seeded with key.

#include <cstdint>

namespace betactl {

/// SplitMix64 finalizer (Steele, Lea & Flood).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class NoiseStream {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    NoiseStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(splitmix64_mix(seed + (stream + 1) * kGamma)) {}

    std::uint64_t word(std::uint64_t i) const noexcept { return splitmix64_mix(key_ + (i + 1) * kGamma); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t i) const noexcept {
        return static_cast<double>(word(i) >> 11) * 0x1.0p-53;
    }
    /// Standard normal draw number k.
    double normal(std::uint64_t k) const noexcept;

private:
    std::uint64_t key_;
};

}  // namespace betactl
