#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aref/core.hpp"
#include "aref/tabulation.hpp"

namespace aref {

// A set of positions on the ring [r]: {(start + j) mod r : 0 <= j < len}.
struct CircularInterval {
    uint64_t start = 0;
    uint64_t len = 0;  // 1 <= len <= r
};

// h(x) = (u(floor(x / r)) + x) mod r: a per-block cyclic shift of the ring
// [r], so contiguous inputs within one block map to a circular interval.
// The block hash u is pluggable so tests can pin its values.
template <class BlockHash = TabulationHash>
class LocalityHashT {
public:
    explicit LocalityHashT(const Params& params)
        : params_(params), u_(params.seed) {}

    LocalityHashT(const Params& params, BlockHash u)
        : params_(params), u_(std::move(u)) {}

    const Params& params() const { return params_; }

    uint64_t block_of(uint64_t x) const {
        return params_.r_bits >= 64 ? 0 : x >> params_.r_bits;
    }

    uint64_t eval_u(uint64_t block) const {
        return u_.eval(block) & params_.r_mask();
    }

    uint64_t eval_h(uint64_t x) const {
        // r divides 2^64, so plain wrapping addition is exact mod r.
        return (eval_u(block_of(x)) + x) & params_.r_mask();
    }

    // Exact image h(I) for |I| <= L <= r: at most one circular interval per
    // touched block (the interval spans at most two blocks).
    std::vector<CircularInterval> image_circular(Interval I) const {
        const uint64_t mask = params_.r_mask();
        if (I.span() > mask)
            throw std::invalid_argument("interval longer than reduced universe");
        std::vector<CircularInterval> out;
        uint64_t lo = I.a;
        while (true) {
            // Blocks are aligned multiples of r, so lo's block ends at lo|mask.
            uint64_t block_end =
                block_of(lo) == block_of(I.b) ? I.b : (lo | mask);
            out.push_back({eval_h(lo), block_end - lo + 1});
            if (block_end == I.b) break;
            lo = block_end + 1;
        }
        return out;
    }

    // Same image rendered as plain intervals in [r] (each circular interval
    // splits in two at the wrap point), so at most four in total.
    std::vector<Interval> image_of_interval(Interval I) const {
        std::vector<Interval> out;
        const uint64_t mask = params_.r_mask();
        for (const CircularInterval& c : image_circular(I)) {
            uint64_t until_end = mask - c.start + 1;  // slots from start to r-1
            if (c.start == 0 || c.len <= until_end) {
                out.emplace_back(c.start, c.start + c.len - 1);
            } else {
                out.emplace_back(c.start, mask);
                out.emplace_back(0, c.len - until_end - 1);
            }
        }
        return out;
    }

private:
    Params params_;
    BlockHash u_;
};

using LocalityHash = LocalityHashT<>;

}  // namespace aref
