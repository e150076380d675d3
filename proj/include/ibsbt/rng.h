#pragma once

#include <cstdint>

// Deterministic RNG used for basket sampling.  We avoid the standard library
// distributions on purpose: their output is implementation-defined, and sweep
// reports must be byte-identical across platforms and runs.

namespace ibsbt {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream mix: every draw index gets its own generator state so that draw k is
// the same irrespective of how many draws precede it or which worker runs it.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t draw_index) {
    std::uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (draw_index + 1));
    return splitmix64_next(s);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64_next(state_); }

    // Unbiased integer in [0, bound) via 128-bit multiply with rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        std::uint64_t lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                x = next();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Integer in [lo, hi] inclusive.
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
        return lo + next_below(hi - lo + 1);
    }

    // Double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace ibsbt
