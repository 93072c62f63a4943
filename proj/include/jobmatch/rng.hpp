#pragma once

// SplitMix64 (Steele, Lea & Flood 2014). Chosen over <random> engines and
// distributions because every draw here must reproduce bit-for-bit across
// compilers, platforms and other-language ports of the corpus generator.
//
// Algorithm, per call:
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Derived values:
//   uniform01()      = (next() >> 11) * 2^-53                 in [0, 1)
//   uniform_below(n) = next() % n, rejecting draws below (2^64 - n) % n
//   normal()         = Box-Muller on (1 - uniform01(), uniform01()), cosine branch
//   derive_seed(m, s, i) = mix(mix(m ^ mix(s)) + i), mix = one SplitMix64 output step

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

namespace jobmatch {

constexpr std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// FNV-1a, 64-bit. Used for string keyed seeding, feature hashing and file checksums.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t hash = 0xCBF29CE484222325ULL) noexcept {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

// Sub-seed for stream `index` of purpose `salt` under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt,
                                    std::uint64_t index) noexcept {
    return splitmix64_mix(splitmix64_mix(master ^ splitmix64_mix(salt)) + index);
}

class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_below(std::uint64_t n) noexcept {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform integer in [lo, hi].
    std::uint64_t uniform_range(std::uint64_t lo, std::uint64_t hi) noexcept {
        return lo + uniform_below(hi - lo + 1);
    }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    double normal() noexcept {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace jobmatch
