#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aref/core.hpp"
#include "aref/range_structure.hpp"
#include "aref/splitmix64.hpp"
#include "aref/tabulation.hpp"

namespace aref {

// The trivial solution: a Bloom filter with k independent seeded tabulation
// hashes, sized for a per-point false positive rate of eps/(L+1), queried
// once per point of the interval. Probe count is |I| by definition.
class BloomBaseline {
public:
    BloomBaseline(const std::vector<uint64_t>& points, const Params& params)
        : params_(params) {
        validate_points(points, params.w);
        double n = std::max<double>(1.0, static_cast<double>(points.size()));
        double per_point_inv = (static_cast<double>(params.max_len) + 1.0) /
                               params_.epsilon();
        constexpr double ln2sq = 0.4804530139182014;  // ln^2 2
        mbits_ = static_cast<uint64_t>(std::ceil(n * std::log(per_point_inv) / ln2sq));
        if (mbits_ == 0) mbits_ = 1;
        k_ = std::max<unsigned>(
            1, static_cast<unsigned>(std::lround(
                   static_cast<double>(mbits_) / n * 0.6931471805599453)));
        hashes_.reserve(k_);
        for (unsigned j = 0; j < k_; ++j)
            hashes_.emplace_back(mix64(params.seed, j));
        bits_.assign((mbits_ + 63) / 64, 0);
        for (uint64_t x : points) insert(x);
    }

    uint64_t bit_count() const { return mbits_; }
    unsigned hash_count() const { return k_; }

    bool contains_point(uint64_t x) const {
        for (const TabulationHash& h : hashes_) {
            uint64_t pos = h.eval(x) % mbits_;
            if (!(bits_[pos / 64] & (1ULL << (pos % 64)))) return false;
        }
        return true;
    }

    // OR of one membership probe per point of I, as the problem definition
    // prescribes; no early exit so the probe count is exactly |I|.
    bool query(Interval I, QueryStats* stats = nullptr) const {
        if (!params_.in_universe(I.b))
            throw std::invalid_argument("interval outside universe");
        if (I.span() > params_.max_len - 1)
            throw std::invalid_argument("interval longer than max query length");
        bool any = false;
        for (uint64_t x = I.a;; ++x) {
            if (stats) ++stats->point_probes;
            any |= contains_point(x);
            if (x == I.b) break;
        }
        return any;
    }

private:
    void insert(uint64_t x) {
        for (const TabulationHash& h : hashes_) {
            uint64_t pos = h.eval(x) % mbits_;
            bits_[pos / 64] |= 1ULL << (pos % 64);
        }
    }

    Params params_;
    uint64_t mbits_ = 0;
    unsigned k_ = 0;
    std::vector<TabulationHash> hashes_;
    std::vector<uint64_t> bits_;
};

}  // namespace aref
