#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace sirate::detail {

// splitmix64 step; used for deriving independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

// Thin deterministic wrapper. All draws go through explicit formulas so the
// stream does not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // standard exponential
    double expo() { return -std::log1p(-unit()); }

    // uniform integer in [0, n)
    std::uint32_t below(std::uint32_t n) {
        return static_cast<std::uint32_t>(unit() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace sirate::detail
