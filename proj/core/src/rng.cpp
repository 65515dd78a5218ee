#include "synthgen/rng.hpp"

#include <cmath>
#include <numbers>

namespace synthgen {

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept {
    // FNV-1a over the label, then mixed with the master seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(master) ^ h);
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
    // Rejection on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % bound;
}

double CounterRng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open0();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

} // namespace synthgen
