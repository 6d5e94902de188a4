#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace samgp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent seeds from (seed, tag...) tuples.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept
{
    std::uint64_t h = mix64(seed);
    for (auto t : tags) {
        h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
    }
    return h;
}

// Lightweight engine for the high-volume noise streams. Seeding is O(1), which matters
// because every (round, tree, node) triple gets its own stream.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31U);
    }

private:
    std::uint64_t state_;
};

// Uniform integer in [0, n). Written out instead of std::uniform_int_distribution so
// the consumed random stream is fixed and replayable by test oracles.
inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    if (n <= 1) {
        return 0;
    }
    // Lemire-style rejection on the full 64-bit range.
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) {
            return static_cast<std::size_t>(r % bound);
        }
    }
}

inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

inline bool coin(Rng& rng, double p)
{
    return uniform01(rng) < p;
}

template <typename It>
void shuffle_range(It first, It last, Rng& rng)
{
    auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
        auto j = uniform_index(rng, i);
        std::swap(first[i - 1], first[j]);
    }
}

} // namespace samgp
