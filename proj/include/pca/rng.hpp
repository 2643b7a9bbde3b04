#pragma once

#include <cstdint>

namespace pca {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based generator: output k of stream s under seed is a pure function of (seed, s, k),
// so independent streams can be drawn in any order.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(splitmix64(seed ^ splitmix64(stream ^ 0xD1B54A32D192ED03ull))) {}

    constexpr std::uint64_t next_u64() noexcept { return splitmix64(key_ + 0x9E3779B97F4A7C15ull * counter_++); }
    // Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n) for 0 < n <= 2^32 (multiply-shift).
    constexpr std::uint32_t below(std::uint32_t n) noexcept {
        return static_cast<std::uint32_t>(((next_u64() >> 32) * n) >> 32);
    }
    constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace pca
