#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "aref/core.hpp"
#include "aref/splitmix64.hpp"

namespace aref {

// A set is L-well-separated when all pairwise distances are >= 2L and every
// point keeps distance 2L-1 / 2L from the universe ends. Each aligned
// length-L block then holds at most one point, and so does each covering
// interval, which is what makes the range-query codec below lossless.
struct WellSepSet {
    std::vector<uint64_t> points;  // sorted
    uint64_t n = 0;
    unsigned w = 0;
    uint64_t max_len = 0;  // L
};

inline bool is_well_separated(const std::vector<uint64_t>& pts, unsigned w,
                              uint64_t L) {
    uint64_t universe = 1ULL << w;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i] < 2 * L - 1 || pts[i] > universe - 2 * L) return false;
        if (i > 0 && pts[i] - pts[i - 1] < 2 * L) return false;
    }
    return true;
}

// Rejection-samples a uniform-flavored L-well-separated set of n points.
// Requires L <= U / 5n so valid placements stay plentiful.
inline WellSepSet gen_wellsep(uint64_t n, unsigned w, uint64_t L,
                              uint64_t seed) {
    if (w < 1 || w > 62)
        throw std::invalid_argument("universe bits must be in 1..62");
    if (!is_pow2(L)) throw std::invalid_argument("L must be a power of two");
    if (n == 0) throw std::invalid_argument("need at least one point");
    uint64_t universe = 1ULL << w;
    if (static_cast<unsigned __int128>(5) * n * L > universe)
        throw std::invalid_argument("parameters too tight: need L <= U/5n");

    uint64_t lo = 2 * L - 1, hi = universe - 2 * L;
    Splitmix64 rng(seed);
    std::set<uint64_t> chosen;
    uint64_t attempts = 0, cap = 10000 * (n + 1);
    while (chosen.size() < n) {
        if (++attempts > cap)
            throw std::runtime_error("rejection sampling cap exceeded");
        uint64_t x = lo + bounded_rand(rng, hi - lo + 1);
        auto next = chosen.lower_bound(x);
        if (next != chosen.end() && *next - x < 2 * L) continue;
        if (next != chosen.begin() && x - *std::prev(next) < 2 * L) continue;
        chosen.insert(x);
    }

    WellSepSet s;
    s.points.assign(chosen.begin(), chosen.end());
    s.n = n;
    s.w = w;
    s.max_len = L;
    return s;
}

// Aligned top intervals T_j = [jL ; (j+1)L - 1].
inline Interval top_interval(uint64_t j, uint64_t L) {
    return Interval(j * L, (j + 1) * L - 1);
}

inline uint64_t top_index(uint64_t x, uint64_t L) { return x / L; }

// A covering interval with signed endpoints: for arbitrary x the left
// endpoint of the level-i left cover can be negative.
struct SignedInterval {
    int64_t a = 0;
    int64_t b = 0;

    bool contains(uint64_t x) const {
        return a <= static_cast<int64_t>(x) && static_cast<int64_t>(x) <= b;
    }

    Interval to_interval() const {
        if (a < 0) throw std::invalid_argument("covering interval out of range");
        return Interval(static_cast<uint64_t>(a), static_cast<uint64_t>(b));
    }

    bool operator==(const SignedInterval&) const = default;
};

// Level-i covering intervals of x, 1 <= i <= lg L. Exactly one of the pair
// contains x, decided by bit i-1 (zero-based) of x; both have length L.
inline std::pair<SignedInterval, SignedInterval> cover_intervals(uint64_t x,
                                                                 unsigned i,
                                                                 uint64_t L) {
    unsigned lg_len = *msb(L);
    if (i < 1 || i > lg_len)
        throw std::invalid_argument("covering level out of range");
    int64_t base = static_cast<int64_t>((x >> i) << i);
    int64_t half = static_cast<int64_t>(1ULL << (i - 1));
    int64_t len = static_cast<int64_t>(L);
    SignedInterval left{base + half - len, base + half - 1};
    SignedInterval right{base + half, base + half + len - 1};
    return {left, right};
}

}  // namespace aref
