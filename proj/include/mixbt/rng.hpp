#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mixbt::rng {

// splitmix64; used to derive independent deterministic streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return splitmix64(h ^ c);
}

// mt19937_64 plus hand-rolled transforms; std::*_distribution output is
// implementation-defined, which would break the bit-for-bit contracts.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {  // Box-Muller, cosine branch
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Index into a cumulative distribution given by non-negative weights
    // summing to ~1; the last index absorbs rounding slack.
    template <typename Container>
    std::size_t categorical(const Container& probs) {
        const double u = uniform01();
        double acc = 0.0;
        std::size_t i = 0;
        for (double p : probs) {
            acc += p;
            if (u < acc) return i;
            ++i;
        }
        return i == 0 ? 0 : i - 1;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace mixbt::rng
