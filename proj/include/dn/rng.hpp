#pragma once

#include <cstdint>

namespace dn {

/// Counter-based SplitMix64 stream. Every randomized operation in the library
/// takes an explicit 64-bit seed and derives all of its randomness from this
/// generator, so identical (input, seed) pairs reproduce identical runs.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound) by rejection; bound must be positive.
    uint64_t next_below(uint64_t bound) {
        uint64_t threshold = -bound % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Derive an independent child stream; used when one seeded operation
    /// spawns several independent sub-operations.
    Rng fork() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ULL); }

private:
    uint64_t state_;
};

} // namespace dn
