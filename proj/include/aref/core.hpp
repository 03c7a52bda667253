#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace aref {

// Index of the highest set bit (0 = least significant); empty for x = 0.
inline std::optional<unsigned> msb(uint64_t x) {
    if (x == 0) return std::nullopt;
    return static_cast<unsigned>(std::bit_width(x) - 1);
}

// A bit-string prefix of a fixed-width value: `len` leading bits, right-aligned
// in `bits`.
struct Prefix {
    unsigned len = 0;
    uint64_t bits = 0;

    bool operator==(const Prefix&) const = default;
};

// Longest common prefix of the w-bit big-endian representations of a and b.
// Length w iff a == b; otherwise w - 1 - msb(a ^ b).
inline Prefix lcp(uint64_t a, uint64_t b, unsigned w) {
    unsigned len = (a == b) ? w : w - 1 - *msb(a ^ b);
    uint64_t bits = (len == 0) ? 0 : a >> (w - len);
    return {len, bits};
}

// Inclusive interval [a; b].
struct Interval {
    uint64_t a = 0;
    uint64_t b = 0;

    Interval() = default;
    Interval(uint64_t a_, uint64_t b_) : a(a_), b(b_) {
        if (a > b) throw std::invalid_argument("interval endpoints reversed");
    }

    // b - a, i.e. length - 1. Avoids overflow for the full 64-bit universe.
    uint64_t span() const { return b - a; }
    bool contains(uint64_t x) const { return a <= x && x <= b; }

    bool operator==(const Interval&) const = default;
};

// Problem configuration. Immutable once validated; r is derived.
struct Params {
    unsigned w = 0;        // universe bits, U = 2^w, 1..64
    uint64_t max_len = 0;  // L, power of two, 1 <= L <= U
    uint64_t eps_num = 0;  // epsilon = eps_num / eps_den, 0 < eps < 1
    uint64_t eps_den = 0;
    uint64_t n = 0;        // point count
    uint64_t seed = 0;
    unsigned r_bits = 0;   // reduced universe r = 2^r_bits
    bool exact = false;    // r clamped to U: zero false positives

    // Mask with the low r_bits set; valid for r_bits = 64 as well.
    uint64_t r_mask() const {
        return r_bits >= 64 ? ~0ULL : (1ULL << r_bits) - 1;
    }
    // r as a 64-bit value; callers must not use this when r_bits = 64.
    uint64_t r() const { return 1ULL << r_bits; }
    // True iff x is a valid universe point.
    bool in_universe(uint64_t x) const { return w >= 64 || x < (1ULL << w); }

    double epsilon() const {
        return static_cast<double>(eps_num) / static_cast<double>(eps_den);
    }
};

inline bool is_pow2(uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

// Validates a configuration and derives r = min(2^ceil(lg(nL/eps)), 2^w),
// never below L so that L <= r always holds.
inline Params validate_params(unsigned w, uint64_t max_len, uint64_t eps_num,
                              uint64_t eps_den, uint64_t n, uint64_t seed) {
    if (w < 1 || w > 64) throw std::invalid_argument("universe bits must be in 1..64");
    if (!is_pow2(max_len)) throw std::invalid_argument("max interval length must be a power of two");
    if (w < 64 && max_len > (1ULL << w))
        throw std::invalid_argument("max interval length exceeds universe");
    if (eps_den == 0 || eps_num == 0 || eps_num >= eps_den)
        throw std::invalid_argument("epsilon must satisfy 0 < eps < 1");

    // ceil(n * L * den / num), computed in 128 bits. A product too large for
    // that is already past any 64-bit universe, so it clamps to exact mode.
    constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0);
    unsigned r_bits;
    bool exact = false;
    if (n != 0 && eps_den > kMax / n / max_len) {
        r_bits = w;
        exact = true;
    } else {
        unsigned __int128 need = static_cast<unsigned __int128>(n) * max_len * eps_den;
        unsigned __int128 target = (need + eps_num - 1) / eps_num;
        if (target < max_len) target = max_len;
        r_bits = 0;
        while (r_bits < 127 &&
               (static_cast<unsigned __int128>(1) << r_bits) < target)
            ++r_bits;
        if (r_bits >= w) {
            r_bits = w;
            exact = true;
        }
    }

    Params p;
    p.w = w;
    p.max_len = max_len;
    p.eps_num = eps_num;
    p.eps_den = eps_den;
    p.n = n;
    p.seed = seed;
    p.r_bits = r_bits;
    p.exact = exact;
    return p;
}

// Checks that pts is strictly increasing with every value below 2^w.
inline void validate_points(const std::vector<uint64_t>& pts, unsigned w) {
    for (size_t i = 0; i < pts.size(); ++i) {
        if (i > 0 && pts[i] <= pts[i - 1])
            throw std::invalid_argument("points must be strictly increasing");
        if (w < 64 && pts[i] >= (1ULL << w))
            throw std::invalid_argument("point outside universe");
    }
}

}  // namespace aref
