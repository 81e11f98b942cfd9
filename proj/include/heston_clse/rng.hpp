#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace heston_clse {

/// SplitMix64 finalizer step; used to expand seeds and to derive stream keys.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stream key for (seed, i0, i1, ...). Distinct index tuples give independent
/// looking, well-separated seeds for per-path generators.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> indices) {
    std::uint64_t state = seed;
    std::uint64_t out = splitmix64_next(state);
    for (std::uint64_t idx : indices) {
        state = out ^ (idx * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
        out = splitmix64_next(state);
    }
    return out;
}

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator so it
/// drives the <random> distributions.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace heston_clse
