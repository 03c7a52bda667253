#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aref/bitvector.hpp"
#include "aref/core.hpp"
#include "aref/packed_array.hpp"
#include "aref/prefix_index.hpp"

namespace aref {

// Per-query instrumentation. All counters grow monotonically, so one struct
// can also accumulate across a batch.
struct QueryStats {
    uint32_t weak_prefix_calls = 0;
    uint32_t interval_probes = 0;  // exact-structure interval queries
    uint64_t point_probes = 0;     // Bloom baseline point lookups
};

// Ground truth: plain sorted array with successor search.
class SortedOracle {
public:
    SortedOracle() = default;
    explicit SortedOracle(std::vector<uint64_t> pts) : pts_(std::move(pts)) {}

    bool contains(Interval I) const {
        auto it = std::lower_bound(pts_.begin(), pts_.end(), I.a);
        return it != pts_.end() && *it <= I.b;
    }

    std::vector<uint64_t> range(Interval I) const {
        auto lo = std::lower_bound(pts_.begin(), pts_.end(), I.a);
        auto hi = std::upper_bound(lo, pts_.end(), I.b);
        return {lo, hi};
    }

    const std::vector<uint64_t>& points() const { return pts_; }

private:
    std::vector<uint64_t> pts_;
};

// Exact range emptiness/reporting over a power-of-two universe [R].
//
// The universe is cut into B = 2^ceil(lg n) aligned buckets. D1 marks the
// non-empty buckets; D2 holds "1 0^{n_i}" per non-empty bucket so a rank in
// D1 plus a select in D2 locates a bucket's slice of the packed, sorted,
// bucket-relative offsets. A query splits into at most two partial-bucket
// parts (answered by weak prefix search on the bucket's offsets) and one
// spanning part (answered by a D1 rank difference).
class BucketedRangeStructure {
public:
    BucketedRangeStructure() = default;

    BucketedRangeStructure(const std::vector<uint64_t>& points,
                           unsigned universe_bits, PrefixIndexKind kind)
        : universe_bits_(universe_bits), kind_(kind), n_(points.size()) {
        if (universe_bits < 1 || universe_bits > 64)
            throw std::invalid_argument("universe bits must be in 1..64");
        validate_points(points, universe_bits);

        bucket_bits_ = pick_bucket_bits(n_, universe_bits);
        offset_width_ = universe_bits - bucket_bits_;
        const uint64_t buckets = 1ULL << bucket_bits_;

        std::vector<bool> d1(buckets, false);
        std::vector<bool> d2;
        d2.reserve(n_ * 2);
        offsets_ = PackedArray(n_, offset_width_);

        size_t i = 0;
        for (uint64_t b = 0; b < buckets && i < n_; ++b) {
            size_t first = i;
            while (i < n_ && bucket_of(points[i]) == b) {
                offsets_.set(i, points[i] & offset_mask());
                ++i;
            }
            if (i == first) continue;
            d1[b] = true;
            d2.push_back(true);
            d2.insert(d2.end(), i - first, false);
        }
        d1_ = BitVector(d1);
        d2_ = BitVector(d2);
        if (kind_ == PrefixIndexKind::ZFast) build_zfast();
    }

    // Reassembles a structure from serialized parts; directories and the
    // binary-search path need nothing beyond the payloads.
    BucketedRangeStructure(BitVector d1, BitVector d2, PackedArray offsets,
                           unsigned universe_bits, PrefixIndexKind kind)
        : universe_bits_(universe_bits),
          kind_(kind),
          n_(offsets.size()),
          d1_(std::move(d1)),
          d2_(std::move(d2)),
          offsets_(std::move(offsets)) {
        bucket_bits_ = pick_bucket_bits(n_, universe_bits);
        offset_width_ = universe_bits - bucket_bits_;
        if (d1_.size() != (1ULL << bucket_bits_) ||
            offsets_.width() != offset_width_ ||
            d2_.size() != n_ + d1_.ones() || d2_.ones() != d1_.ones())
            throw std::invalid_argument("inconsistent structure payloads");
    }

    static unsigned pick_bucket_bits(uint64_t n, unsigned universe_bits) {
        if (n <= 1) return 0;
        unsigned b = static_cast<unsigned>(std::bit_width(n - 1));  // ceil(lg n)
        return std::min(b, universe_bits);
    }

    size_t size() const { return n_; }
    unsigned universe_bits() const { return universe_bits_; }
    unsigned bucket_bits() const { return bucket_bits_; }
    unsigned offset_width() const { return offset_width_; }
    uint64_t bucket_count() const { return 1ULL << bucket_bits_; }
    PrefixIndexKind index_kind() const { return kind_; }
    const BitVector& d1() const { return d1_; }
    const BitVector& d2() const { return d2_; }
    const PackedArray& offsets() const { return offsets_; }
    const ZFastIndexSet& zfast() const { return zfast_; }
    ZFastIndexSet& zfast_mutable() { return zfast_; }

    bool contains(Interval I, QueryStats* stats = nullptr) const {
        check_interval(I);
        if (n_ == 0) return false;
        uint64_t ba = bucket_of(I.a), bb = bucket_of(I.b);
        uint64_t alo = I.a & offset_mask(), bhi = I.b & offset_mask();
        if (ba == bb) return partial_hit(ba, alo, bhi, stats).has_value();
        if (partial_hit(ba, alo, offset_mask(), stats)) return true;
        if (partial_hit(bb, 0, bhi, stats)) return true;
        return d1_.rank1(bb) - d1_.rank1(ba + 1) > 0;
    }

    std::vector<uint64_t> report(Interval I) const {
        check_interval(I);
        std::vector<uint64_t> out;
        if (n_ == 0) return out;
        uint64_t ba = bucket_of(I.a), bb = bucket_of(I.b);
        uint64_t alo = I.a & offset_mask(), bhi = I.b & offset_mask();
        if (ba == bb) {
            expand_into(out, ba, alo, bhi);
            return out;
        }
        expand_into(out, ba, alo, offset_mask());
        for (size_t k = d1_.rank1(ba + 1), end = d1_.rank1(bb); k < end; ++k) {
            uint64_t bucket = d1_.select1(k);
            Segment seg = segment_of_nth(k);
            uint64_t base = bucket_base(bucket);
            for (uint32_t i = 0; i < seg.count; ++i)
                out.push_back(base + offsets_.get(seg.start + i));
        }
        expand_into(out, bb, 0, bhi);
        return out;
    }

    // Exact payload accounting in bits (no word padding, no directories).
    struct Space {
        size_t offsets_bits = 0;
        size_t d1_bits = 0;
        size_t d2_bits = 0;
        size_t index_bits = 0;
        size_t total() const {
            return offsets_bits + d1_bits + d2_bits + index_bits;
        }
    };

    Space space() const {
        Space s;
        s.offsets_bits = offsets_.payload_bits();
        s.d1_bits = d1_.size();
        s.d2_bits = d2_.size();
        if (kind_ == PrefixIndexKind::ZFast)
            s.index_bits = zfast_.node_count() * kZFastRecordBytes * 8 +
                           d1_.ones() * 32;
        return s;
    }

    static constexpr size_t kZFastRecordBytes = 13;  // len u8 + 3 x u32

    struct Segment {
        size_t start = 0;
        uint32_t count = 0;
    };

    // Slice of the offsets array for the k-th non-empty bucket.
    Segment segment_of_nth(size_t k) const {
        size_t one_pos = d2_.select1(k);
        size_t start = one_pos - k;
        size_t next = (k + 1 < d1_.ones()) ? d2_.select1(k + 1) : d2_.size();
        return {start, static_cast<uint32_t>(next - one_pos - 1)};
    }

    KeyView bucket_view(uint64_t bucket) const {
        Segment seg = segment_of_nth(d1_.rank1(bucket));
        return {&offsets_, seg.start, seg.count, offset_width_};
    }

    void build_zfast() {
        zfast_ = ZFastIndexSet();
        size_t nonempty = d1_.ones();
        if (n_ > 0xFFFFFFFFULL)
            throw std::invalid_argument("zfast index limited to 2^32 points");
        for (size_t k = 0; k < nonempty; ++k) {
            uint64_t bucket = d1_.select1(k);
            if (offset_width_ == 0) continue;
            zfast_.build_bucket(static_cast<uint32_t>(bucket),
                                bucket_view(bucket));
        }
    }

private:
    void check_interval(Interval I) const {
        if (universe_bits_ < 64 && I.b >= (1ULL << universe_bits_))
            throw std::invalid_argument("interval outside universe");
    }

    uint64_t bucket_of(uint64_t x) const {
        return bucket_bits_ == 0 ? 0 : x >> offset_width_;
    }

    uint64_t bucket_base(uint64_t bucket) const {
        return bucket_bits_ == 0 ? 0 : bucket << offset_width_;
    }

    uint64_t offset_mask() const {
        return offset_width_ >= 64 ? ~0ULL : (1ULL << offset_width_) - 1;
    }

    RankRange run_weak_prefix(uint64_t bucket, const KeyView& view,
                              const Prefix& p, QueryStats* stats) const {
        if (stats) ++stats->weak_prefix_calls;
        if (kind_ == PrefixIndexKind::ZFast)
            return zfast_.weak_prefix(static_cast<uint32_t>(bucket), view, p);
        return weak_prefix_binary(view, p);
    }

    // Local rank of some stored key in [lo, hi] within the bucket, if any.
    // The two-condition test: the largest key prefixed p#0 that is >= lo, or
    // the smallest key prefixed p#1 that is <= hi, where p = lcp(lo, hi).
    std::optional<uint32_t> partial_hit(uint64_t bucket, uint64_t lo,
                                        uint64_t hi, QueryStats* stats) const {
        if (!d1_.bit(bucket)) return std::nullopt;
        if (offset_width_ == 0) return 0;  // whole (singleton) bucket
        if (lo == 0 && hi == offset_mask()) return 0;  // any key is a witness
        KeyView view = bucket_view(bucket);

        if (lo == hi) {
            RankRange rr = run_weak_prefix(bucket, view, {offset_width_, lo}, stats);
            if (view.key(rr.lo) == lo) return rr.lo;
            return std::nullopt;
        }

        Prefix p = lcp(lo, hi, offset_width_);
        unsigned shift = offset_width_ - p.len - 1;
        Prefix q0{p.len + 1, lo >> shift};
        RankRange r0 = run_weak_prefix(bucket, view, q0, stats);
        uint64_t k0 = view.key(r0.hi);
        if ((k0 >> shift) == q0.bits && k0 >= lo) return r0.hi;

        Prefix q1{p.len + 1, hi >> shift};
        RankRange r1 = run_weak_prefix(bucket, view, q1, stats);
        uint64_t k1 = view.key(r1.lo);
        if ((k1 >> shift) == q1.bits && k1 <= hi) return r1.lo;
        return std::nullopt;
    }

    // Appends (in order) every stored point of `bucket` whose offset lies in
    // [lo, hi]: find one witness, then scan outward from it.
    void expand_into(std::vector<uint64_t>& out, uint64_t bucket, uint64_t lo,
                     uint64_t hi) const {
        auto hit = partial_hit(bucket, lo, hi, nullptr);
        if (!hit) return;
        KeyView view = bucket_view(bucket);
        uint32_t l = *hit, r = *hit;
        while (l > 0 && view.key(l - 1) >= lo) --l;
        while (r + 1 < view.count && view.key(r + 1) <= hi) ++r;
        uint64_t base = bucket_base(bucket);
        for (uint32_t i = l; i <= r; ++i) out.push_back(base + view.key(i));
    }

    unsigned universe_bits_ = 0;
    unsigned bucket_bits_ = 0;
    unsigned offset_width_ = 0;
    PrefixIndexKind kind_ = PrefixIndexKind::BinarySearch;
    size_t n_ = 0;
    BitVector d1_;
    BitVector d2_;
    PackedArray offsets_;
    ZFastIndexSet zfast_;
};

}  // namespace aref
