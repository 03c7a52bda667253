#pragma once

#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "aref/core.hpp"
#include "aref/packed_array.hpp"

namespace aref {

enum class PrefixIndexKind : uint8_t { BinarySearch = 0, ZFast = 1 };

// Read-only window over one bucket's sorted keys inside the packed offsets.
struct KeyView {
    const PackedArray* arr = nullptr;
    size_t base = 0;
    uint32_t count = 0;
    unsigned width = 0;

    uint64_t key(uint32_t i) const { return arr->get(base + i); }
};

// Inclusive rank interval. Arbitrary (but in-range) when no key has the
// queried prefix; callers always validate the pointed-to keys.
struct RankRange {
    uint32_t lo = 0;
    uint32_t hi = 0;
};

namespace detail {

inline bool prefix_matches(uint64_t key, unsigned width, const Prefix& p,
                           unsigned upto) {
    if (upto == 0) return true;
    return (key >> (width - upto)) == (p.bits >> (p.len - upto));
}

// The unique integer in (a, b] divisible by the largest power of two.
inline unsigned fattest(unsigned a, unsigned b) {
    unsigned i = *msb(a ^ b);
    return b & ~((1u << i) - 1);
}

}  // namespace detail

// Weak prefix search by two binary searches over the sorted keys: first key
// >= p00..0 and last key <= p11..1. Always exact, no storage.
inline RankRange weak_prefix_binary(const KeyView& view, const Prefix& p) {
    if (view.count == 0) throw std::invalid_argument("empty key view");
    if (p.len == 0) return {0, view.count - 1};
    unsigned tail = view.width - p.len;
    uint64_t lo_key = p.bits << tail;
    uint64_t hi_key = lo_key | (tail == 0 ? 0 : (1ULL << tail) - 1);

    uint32_t l = 0, r = view.count;  // first index with key >= lo_key
    while (l < r) {
        uint32_t mid = l + (r - l) / 2;
        if (view.key(mid) < lo_key) l = mid + 1;
        else r = mid;
    }
    if (l == view.count || view.key(l) > hi_key) return {0, 0};

    uint32_t l2 = l, r2 = view.count - 1;  // last index with key <= hi_key
    while (l2 < r2) {
        uint32_t mid = l2 + (r2 - l2 + 1) / 2;
        if (view.key(mid) <= hi_key) l2 = mid;
        else r2 = mid - 1;
    }
    return {l, l2};
}

// Z-fast style index: compacted binary trie over each bucket's keys with a
// hash map from node handles (extent prefixes cut at the 2-fattest length of
// the node's skip interval) to rank intervals. Queries run a fat binary
// search over prefix lengths, verifying every candidate against the stored
// keys, then descend child pointers to the exit node. Exact whenever the
// prefix is populated; otherwise some in-range interval comes back and the
// caller validates.
class ZFastIndexSet {
public:
    struct Node {
        uint32_t lo = 0;
        uint32_t hi = 0;
        uint32_t mid = 0;  // last rank in the left (bit 0) child
    };

    struct Key {
        uint32_t bucket = 0;
        uint32_t len = 0;
        uint64_t bits = 0;
        bool operator==(const Key&) const = default;
    };

    struct KeyHash {
        size_t operator()(const Key& k) const {
            uint64_t h = k.bits * 0x9E3779B97F4A7C15ULL;
            h ^= ((static_cast<uint64_t>(k.bucket) << 8) | k.len) *
                 0xBF58476D1CE4E5B9ULL;
            return static_cast<size_t>(h ^ (h >> 29));
        }
    };

    using Map = std::unordered_map<Key, Node, KeyHash>;

    void build_bucket(uint32_t bucket, const KeyView& view) {
        struct Frame {
            uint32_t lo, hi;
            int parent_elen;
        };
        std::vector<Frame> stack{{0, view.count - 1, -1}};
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            if (f.lo == f.hi) continue;
            unsigned elen = lcp(view.key(f.lo), view.key(f.hi), view.width).len;
            uint32_t mid = split_rank(view, f.lo, f.hi, elen);
            unsigned hlen =
                f.parent_elen < 0
                    ? 0
                    : detail::fattest(static_cast<unsigned>(f.parent_elen), elen);
            insert(bucket, hlen, handle_bits(view, f.lo, hlen), {f.lo, f.hi, mid});
            stack.push_back({f.lo, mid, static_cast<int>(elen)});
            stack.push_back({mid + 1, f.hi, static_cast<int>(elen)});
        }
    }

    RankRange weak_prefix(uint32_t bucket, const KeyView& view,
                          const Prefix& p) const {
        const uint32_t cnt = view.count;
        if (cnt == 0) throw std::invalid_argument("empty key view");
        if (p.len == 0 || cnt == 1) return {0, cnt - 1};

        const unsigned m = p.len;
        Node best{0, cnt - 1, 0};
        {
            auto it = map_.find({bucket, 0, 0});
            if (it == map_.end()) throw std::logic_error("missing trie root");
            best = it->second;
        }
        unsigned best_elen = extent_len(view, best);
        if (!detail::prefix_matches(view.key(best.lo), view.width, p,
                                    std::min(best_elen, m)))
            return {0, cnt - 1};

        // Fat binary search over candidate handle lengths in (l, r].
        unsigned l = std::min(best_elen, m), r = m;
        while (l < r) {
            unsigned f = detail::fattest(l, r);
            auto it = map_.find({bucket, f, p.bits >> (m - f)});
            if (it != map_.end()) {
                unsigned elen = extent_len(view, it->second);
                unsigned t = std::min(elen, m);
                if (detail::prefix_matches(view.key(it->second.lo), view.width,
                                           p, t)) {
                    best = it->second;
                    best_elen = elen;
                    l = t;
                    continue;
                }
            }
            r = f - 1;
        }

        // Child-step descent from the deepest verified path node.
        while (best_elen < m) {
            unsigned bit = (p.bits >> (m - 1 - best_elen)) & 1;
            uint32_t clo = bit ? best.mid + 1 : best.lo;
            uint32_t chi = bit ? best.hi : best.mid;
            if (clo == chi) return {clo, chi};  // leaf; caller validates
            unsigned celen = lcp(view.key(clo), view.key(chi), view.width).len;
            if (!detail::prefix_matches(view.key(clo), view.width, p,
                                        std::min(celen, m)))
                return {clo, chi};  // prefix unpopulated
            unsigned f = detail::fattest(best_elen, celen);
            auto it = map_.find({bucket, f, handle_bits(view, clo, f)});
            if (it == map_.end()) throw std::logic_error("missing trie node");
            best = it->second;
            best_elen = celen;
        }
        return {best.lo, best.hi};
    }

    const Map& entries() const { return map_; }
    size_t node_count() const { return map_.size(); }

    void insert(uint32_t bucket, unsigned hlen, uint64_t hbits, Node node) {
        map_.emplace(Key{bucket, hlen, hbits}, node);
    }

private:
    static uint64_t handle_bits(const KeyView& view, uint32_t lo, unsigned hlen) {
        return hlen == 0 ? 0 : view.key(lo) >> (view.width - hlen);
    }

    static unsigned extent_len(const KeyView& view, const Node& node) {
        if (node.lo == node.hi) return view.width;
        return lcp(view.key(node.lo), view.key(node.hi), view.width).len;
    }

    // Last rank in [lo, hi] whose key has bit `elen` (from the top) clear.
    static uint32_t split_rank(const KeyView& view, uint32_t lo, uint32_t hi,
                               unsigned elen) {
        uint32_t l = lo, r = hi;
        unsigned shift = view.width - elen - 1;
        while (l < r) {
            uint32_t mid = l + (r - l + 1) / 2;
            if ((view.key(mid) >> shift) & 1) r = mid - 1;
            else l = mid;
        }
        return l;
    }

    Map map_;
};

}  // namespace aref
