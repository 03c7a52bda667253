#pragma once

#include <cstdint>

namespace aref {

// Fixed-increment splitmix64 (Vigna's public-domain generator). Used for all
// deterministic seed expansion so serialized structures only carry a 64-bit
// seed and rebuild bit-identically everywhere.
class Splitmix64 {
public:
    explicit Splitmix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t operator()() { return next(); }

private:
    uint64_t state_;
};

// One-shot mix of two words into a fresh seed (per-trial RNG derivation).
inline uint64_t mix64(uint64_t a, uint64_t b) {
    Splitmix64 g(a ^ (b * 0xD1B54A32D192ED03ULL));
    g.next();
    return g.next();
}

// Uniform value in [0, bound), bound >= 1. Rejection against 2^64 mod bound.
template <class Rng>
uint64_t bounded_rand(Rng& rng, uint64_t bound) {
    if ((bound & (bound - 1)) == 0) return rng() & (bound - 1);
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        uint64_t v = rng();
        if (v >= threshold) return v % bound;
    }
}

}  // namespace aref
