#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "ictrace/common.hpp"

namespace ictrace {

/// Counter-based generator (SplitMix64): the state advances by a fixed
/// increment and each output is a bijective mix of the state, so streams can
/// be split by seed derivation without overlap concerns. Output sequences are
/// identical across platforms, which is what makes runs byte-reproducible.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from (master, stream index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 g(master ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
    return g();
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(master, a), b);
}

/// Unbiased integer in [0, n) by rejection.
inline std::size_t uniform_index(SplitMix64& rng, std::size_t n) {
    if (n == 0) throw ArgumentError("uniform_index: empty range");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % n);
}

/// Uniform double in [0, 1) with 53 random mantissa bits.
inline double uniform_real01(SplitMix64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller. Consumes two uniforms per draw; the sine
/// branch is discarded so draws are independent of call grouping.
inline double standard_normal(SplitMix64& rng) {
    const double u1 = 1.0 - uniform_real01(rng);  // (0, 1]
    const double u2 = uniform_real01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[uniform_index(rng, i)]);
    }
}

}  // namespace ictrace
