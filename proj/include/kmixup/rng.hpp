#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kmixup {

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Independent generator stream `stream` derived from a base seed.
/// Streams are keyed by hashing (seed, stream) through SplitMix64, so worker
/// i of a pool uses make_stream(seed, i) and never shares state with worker j.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    const std::uint64_t a = detail::splitmix64(seed);
    const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(stream + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1) built from the top 53 bits; identical across platforms.
template <class Gen>
double uniform01(Gen& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) without modulo bias.
template <class Gen>
std::uint64_t uniform_index(Gen& gen, std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t r;
    do {
        r = gen();
    } while (r >= limit);
    return r % n;
}

/// Standard normal via Box-Muller on uniform01 (platform independent, unlike
/// std::normal_distribution).
template <class Gen>
double standard_normal(Gen& gen) {
    double u1;
    do {
        u1 = uniform01(gen);
    } while (u1 <= 0.0);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace kmixup
