#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "aref/range_structure.hpp"
#include "aref/splitmix64.hpp"

using namespace aref;

namespace {

std::vector<uint64_t> random_set(uint64_t universe, size_t n, uint64_t seed) {
    Splitmix64 rng(seed);
    std::set<uint64_t> s;
    while (s.size() < n) s.insert(bounded_rand(rng, universe));
    return {s.begin(), s.end()};
}

// Every stored key as (bucket, offset) pairs must reconstruct the input.
void check_layout_roundtrip(const std::vector<uint64_t>& pts, unsigned ubits,
                            PrefixIndexKind kind) {
    BucketedRangeStructure st(pts, ubits, kind);
    std::vector<uint64_t> rebuilt;
    size_t nonempty = st.d1().ones();
    for (size_t k = 0; k < nonempty; ++k) {
        uint64_t bucket = st.d1().select1(k);
        auto seg = st.segment_of_nth(k);
        for (uint32_t i = 0; i < seg.count; ++i)
            rebuilt.push_back((bucket << st.offset_width()) +
                              st.offsets().get(seg.start + i));
    }
    CHECK(rebuilt == pts);
}

}  // namespace

TEST_CASE("sorted oracle") {
    SortedOracle o({2, 9, 12, 13});
    CHECK_FALSE(o.contains(Interval(3, 8)));
    CHECK(o.contains(Interval(0, 2)));
    CHECK(SortedOracle{}.contains(Interval(0, 100)) == false);
}

TEST_CASE("layout example: {2,9,12,13} in [16] with 4 buckets") {
    BucketedRangeStructure st({2, 9, 12, 13}, 4, PrefixIndexKind::BinarySearch);
    CHECK(st.bucket_count() == 4);
    CHECK(st.offset_width() == 2);

    // D1 = 1011 (buckets 0, 2, 3 non-empty)
    REQUIRE(st.d1().size() == 4);
    CHECK(st.d1().bit(0));
    CHECK_FALSE(st.d1().bit(1));
    CHECK(st.d1().bit(2));
    CHECK(st.d1().bit(3));

    // D2 = 10 10 100 (one '1' then n_i zeros per non-empty bucket)
    std::vector<bool> expect_d2{1, 0, 1, 0, 1, 0, 0};
    REQUIRE(st.d2().size() == expect_d2.size());
    for (size_t i = 0; i < expect_d2.size(); ++i)
        CHECK(st.d2().bit(i) == expect_d2[i]);

    // Offsets are bucket-relative: 2, 1, 0, 1.
    std::vector<uint64_t> offs;
    for (size_t i = 0; i < 4; ++i) offs.push_back(st.offsets().get(i));
    CHECK(offs == std::vector<uint64_t>{2, 1, 0, 1});

    check_layout_roundtrip({2, 9, 12, 13}, 4, PrefixIndexKind::BinarySearch);
}

TEST_CASE("empty set builds and answers empty") {
    BucketedRangeStructure st({}, 12, PrefixIndexKind::BinarySearch);
    CHECK(st.d1().ones() == 0);
    CHECK(st.d2().size() == 0);
    CHECK_FALSE(st.contains(Interval(0, (1 << 12) - 1)));
    CHECK(st.report(Interval(0, 100)).empty());
}

TEST_CASE("build rejects bad input") {
    CHECK_THROWS_AS(
        BucketedRangeStructure({3, 3}, 8, PrefixIndexKind::BinarySearch),
        std::invalid_argument);
    CHECK_THROWS_AS(
        BucketedRangeStructure({5, 4}, 8, PrefixIndexKind::BinarySearch),
        std::invalid_argument);
    CHECK_THROWS_AS(
        BucketedRangeStructure({256}, 8, PrefixIndexKind::BinarySearch),
        std::invalid_argument);
}

TEST_CASE("weak prefix examples on keys {2,9,12,13}, width 4") {
    // Single bucket: universe [16], one bucket of width 16.
    std::vector<uint64_t> keys{2, 9, 12, 13};
    PackedArray arr(4, 4);
    for (size_t i = 0; i < keys.size(); ++i) arr.set(i, keys[i]);
    KeyView view{&arr, 0, 4, 4};

    ZFastIndexSet zf;
    zf.build_bucket(0, view);

    auto check_both = [&](Prefix p, uint32_t lo, uint32_t hi) {
        RankRange rb = weak_prefix_binary(view, p);
        CHECK(rb.lo == lo);
        CHECK(rb.hi == hi);
        RankRange rz = zf.weak_prefix(0, view, p);
        CHECK(rz.lo == lo);
        CHECK(rz.hi == hi);
    };

    check_both(Prefix{1, 1}, 1, 3);   // p = "1" -> ranks [1,3]
    check_both(Prefix{0, 0}, 0, 3);   // p = ""  -> all
    check_both(Prefix{2, 3}, 2, 3);   // p = "11" -> {12,13}
    check_both(Prefix{4, 9}, 1, 1);   // full-width key
    check_both(Prefix{2, 0}, 0, 0);   // p = "00" -> {2}
}

TEST_CASE("weak prefix: populated prefixes exact for random sets") {
    Splitmix64 rng(2025);
    for (int trial = 0; trial < 200; ++trial) {
        unsigned width = 1 + rng() % 16;
        uint64_t universe = 1ULL << width;
        size_t n = 1 + rng() % std::min<uint64_t>(universe, 60);
        std::vector<uint64_t> keys = random_set(universe, n, rng());
        PackedArray arr(n, width);
        for (size_t i = 0; i < n; ++i) arr.set(i, keys[i]);
        KeyView view{&arr, 0, static_cast<uint32_t>(n), width};
        ZFastIndexSet zf;
        zf.build_bucket(0, view);

        for (unsigned plen = 0; plen <= width; ++plen) {
            for (uint64_t bits = 0; bits < (1ULL << plen); ++bits) {
                if (plen > 8) {  // sample deep prefixes only
                    bits = rng() & ((1ULL << plen) - 1);
                }
                // Oracle: scan.
                uint32_t lo = UINT32_MAX, hi = 0;
                for (uint32_t i = 0; i < n; ++i) {
                    if (plen == 0 || (keys[i] >> (width - plen)) == bits) {
                        lo = std::min(lo, i);
                        hi = std::max(hi, i);
                    }
                }
                Prefix p{plen, bits};
                if (lo != UINT32_MAX) {
                    RankRange rb = weak_prefix_binary(view, p);
                    CHECK(rb.lo == lo);
                    CHECK(rb.hi == hi);
                    RankRange rz = zf.weak_prefix(0, view, p);
                    CHECK(rz.lo == lo);
                    CHECK(rz.hi == hi);
                } else {
                    // Arbitrary answers allowed, but must be in range.
                    RankRange rz = zf.weak_prefix(0, view, p);
                    CHECK(rz.hi < n);
                    CHECK(rz.lo <= rz.hi);
                }
                if (plen > 8) break;
            }
        }
    }
}

TEST_CASE("weak prefix at full 64-bit width") {
    Splitmix64 rng(606);
    for (int trial = 0; trial < 10; ++trial) {
        size_t n = 2 + rng() % 300;
        std::set<uint64_t> set;
        while (set.size() < n) set.insert(rng());
        std::vector<uint64_t> keys(set.begin(), set.end());
        PackedArray arr(n, 64);
        for (size_t i = 0; i < n; ++i) arr.set(i, keys[i]);
        KeyView view{&arr, 0, static_cast<uint32_t>(n), 64};
        ZFastIndexSet zf;
        zf.build_bucket(0, view);

        // Every populated prefix of every key must come back exact.
        for (size_t i = 0; i < n; ++i) {
            for (unsigned plen : {1u, 7u, 13u, 32u, 50u, 63u, 64u}) {
                uint64_t bits = keys[i] >> (64 - plen);
                uint32_t lo = UINT32_MAX, hi = 0;
                for (uint32_t j = 0; j < n; ++j)
                    if ((keys[j] >> (64 - plen)) == bits) {
                        lo = std::min(lo, j);
                        hi = std::max(hi, j);
                    }
                Prefix p{plen, bits};
                RankRange rb = weak_prefix_binary(view, p);
                RankRange rz = zf.weak_prefix(0, view, p);
                CHECK(rb.lo == lo);
                CHECK(rb.hi == hi);
                CHECK(rz.lo == lo);
                CHECK(rz.hi == hi);
            }
        }
        // Unpopulated prefixes: any in-range answer.
        for (int t = 0; t < 200; ++t) {
            unsigned plen = 1 + rng() % 64;
            Prefix p{plen, rng() >> (64 - plen)};
            RankRange rz = zf.weak_prefix(0, view, p);
            CHECK(rz.lo <= rz.hi);
            CHECK(rz.hi < n);
        }
    }
}

TEST_CASE("query examples") {
    for (auto kind : {PrefixIndexKind::BinarySearch, PrefixIndexKind::ZFast}) {
        BucketedRangeStructure st({2, 9, 12, 13}, 4, kind);
        CHECK_FALSE(st.contains(Interval(3, 8)));
        CHECK(st.contains(Interval(10, 12)));
        CHECK(st.contains(Interval(0, 15)));
        CHECK(st.report(Interval(9, 13)) == std::vector<uint64_t>{9, 12, 13});
        CHECK(st.report(Interval(3, 8)).empty());
        CHECK(st.report(Interval(2, 2)) == std::vector<uint64_t>{2});
    }
}

TEST_CASE("oracle equivalence, exhaustive at R=2^8") {
    const unsigned ubits = 8;
    const uint64_t universe = 1ULL << ubits;
    Splitmix64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        size_t n = trial == 0 ? 0 : bounded_rand(rng, universe / 2);
        std::vector<uint64_t> pts = random_set(universe, n, rng());
        SortedOracle oracle(pts);
        BucketedRangeStructure bin(pts, ubits, PrefixIndexKind::BinarySearch);
        BucketedRangeStructure zf(pts, ubits, PrefixIndexKind::ZFast);
        for (uint64_t a = 0; a < universe; ++a)
            for (uint64_t b = a; b < universe; ++b) {
                Interval I(a, b);
                bool expect = oracle.contains(I);
                CHECK(bin.contains(I) == expect);
                CHECK(zf.contains(I) == expect);
            }
        for (int t = 0; t < 300; ++t) {
            uint64_t a = bounded_rand(rng, universe);
            uint64_t b = a + bounded_rand(rng, universe - a);
            Interval I(a, b);
            CHECK(bin.report(I) == oracle.range(I));
            CHECK(zf.report(I) == oracle.range(I));
        }
    }
}

TEST_CASE("probe budget: at most two weak-prefix calls per partial part") {
    Splitmix64 rng(88);
    for (auto kind : {PrefixIndexKind::BinarySearch, PrefixIndexKind::ZFast}) {
        std::vector<uint64_t> pts = random_set(1ULL << 20, 5000, 9);
        BucketedRangeStructure st(pts, 20, kind);
        for (int t = 0; t < 20000; ++t) {
            uint64_t a = bounded_rand(rng, 1ULL << 20);
            uint64_t b = a + bounded_rand(rng, (1ULL << 20) - a);
            QueryStats stats;
            st.contains(Interval(a, b), &stats);
            CHECK(stats.weak_prefix_calls <= 4);
        }
    }
}

TEST_CASE("differential: both index variants agree on random universes") {
    Splitmix64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        unsigned ubits = 4 + rng() % 29;
        uint64_t universe = 1ULL << ubits;
        size_t n = 1 + bounded_rand(rng, std::min<uint64_t>(universe, 3000));
        std::vector<uint64_t> pts = random_set(universe, n, rng());
        SortedOracle oracle(pts);
        BucketedRangeStructure bin(pts, ubits, PrefixIndexKind::BinarySearch);
        BucketedRangeStructure zf(pts, ubits, PrefixIndexKind::ZFast);
        for (int t = 0; t < 3000; ++t) {
            uint64_t a = bounded_rand(rng, universe);
            uint64_t b = a + bounded_rand(rng, universe - a);
            Interval I(a, b);
            bool expect = oracle.contains(I);
            CHECK(bin.contains(I) == expect);
            CHECK(zf.contains(I) == expect);
        }
    }
}

TEST_CASE("space identity") {
    for (auto kind : {PrefixIndexKind::BinarySearch, PrefixIndexKind::ZFast}) {
        std::vector<uint64_t> pts = random_set(1ULL << 24, 2000, 55);
        BucketedRangeStructure st(pts, 24, kind);
        auto sp = st.space();
        CHECK(sp.offsets_bits == st.size() * st.offset_width());
        CHECK(sp.d1_bits == st.bucket_count());
        CHECK(sp.d2_bits == st.size() + st.d1().ones());
        CHECK(sp.total() ==
              sp.offsets_bits + sp.d1_bits + sp.d2_bits + sp.index_bits);
        if (kind == PrefixIndexKind::BinarySearch) CHECK(sp.index_bits == 0);
    }
}

TEST_CASE("interval outside universe rejected") {
    BucketedRangeStructure st({1, 2}, 8, PrefixIndexKind::BinarySearch);
    CHECK_THROWS_AS(st.contains(Interval(0, 256)), std::invalid_argument);
}

TEST_CASE("full 64-bit universe") {
    std::vector<uint64_t> pts{0, 5, 1ULL << 63, ~0ULL - 7, ~0ULL};
    for (auto kind : {PrefixIndexKind::BinarySearch, PrefixIndexKind::ZFast}) {
        BucketedRangeStructure st(pts, 64, kind);
        SortedOracle oracle(pts);
        CHECK(st.contains(Interval(0, 0)));
        CHECK(st.contains(Interval(~0ULL, ~0ULL)));
        CHECK(st.contains(Interval(1, 6)));
        CHECK_FALSE(st.contains(Interval(6, (1ULL << 63) - 1)));
        CHECK(st.report(Interval(0, ~0ULL)) == pts);
        Splitmix64 rng(21);
        for (int t = 0; t < 20000; ++t) {
            uint64_t a = rng(), b = rng();
            if (a > b) std::swap(a, b);
            Interval I(a, b);
            CHECK(st.contains(I) == oracle.contains(I));
        }
    }

    // Single point: one bucket spanning the whole 64-bit ring.
    BucketedRangeStructure one({1ULL << 40}, 64, PrefixIndexKind::ZFast);
    CHECK(one.bucket_count() == 1);
    CHECK(one.offset_width() == 64);
    CHECK(one.contains(Interval(1ULL << 40, 1ULL << 40)));
    CHECK(one.contains(Interval(0, ~0ULL)));
    CHECK_FALSE(one.contains(Interval(0, (1ULL << 40) - 1)));
    CHECK_FALSE(one.contains(Interval((1ULL << 40) + 1, ~0ULL)));
    CHECK(one.report(Interval(0, ~0ULL)) == std::vector<uint64_t>{1ULL << 40});

    BucketedRangeStructure none({}, 64, PrefixIndexKind::BinarySearch);
    CHECK_FALSE(none.contains(Interval(0, ~0ULL)));
}
