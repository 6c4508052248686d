#pragma once

#include <cstdint>

namespace kforge::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9 on (0, 1)).
double inverse_normal_cdf(double p) noexcept;

/// Counter-based stream: draw k depends only on (master seed, stream id, salt, k).
///
/// Word k is mix64(key + (k + 1) * golden), i.e. element k of the SplitMix64 sequence
/// seeded with key, so any draw can be produced without touching the others.
class CounterStream {
public:
    CounterStream(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t salt = 0) noexcept
        : key_(mix64(master_seed ^ mix64(stream ^ mix64(salt)))) {}

    [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix64(key_ + counter * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    [[nodiscard]] double uniform(std::uint64_t counter) const noexcept {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    [[nodiscard]] double normal(std::uint64_t counter) const noexcept { return inverse_normal_cdf(uniform(counter)); }

private:
    std::uint64_t key_;
};

// Salts separating the draws of different samplers under one master seed.
inline constexpr std::uint64_t salt_gaussian_vector = 0x4756;
inline constexpr std::uint64_t salt_frame = 0x4652;
inline constexpr std::uint64_t salt_wiener = 0x5749;

}  // namespace kforge::rng
