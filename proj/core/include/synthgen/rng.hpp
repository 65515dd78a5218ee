#pragma once

#include <cstdint>
#include <string_view>

namespace synthgen {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for a labeled stage: hash(master || label).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

/// Child seed for an indexed sub-stream (tree i, seed row i, ...).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Counter-based generator. Output i of a stream is mix64(key + (i+1)*gamma),
/// so any (key, counter) position can be reached without replaying the stream.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(mix64(key)), counter_(counter) {}

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log argument.
    double uniform_open0() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Unbiased integer in [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Standard normal via Box-Muller; caches the second variate.
    double normal() noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace synthgen
