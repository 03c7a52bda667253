#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "aref/core.hpp"
#include "aref/locality_hash.hpp"
#include "aref/range_structure.hpp"

namespace aref {

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

struct SpaceReport {
    size_t total_bits = 0;
    size_t header_bits = 0;  // fixed header + CRC trailer
    size_t d1_bits = 0;
    size_t d2_bits = 0;
    size_t offsets_bits = 0;
    size_t index_bits = 0;
    double bound_bits = 0;      // n * lg(L / epsilon)
    double ratio = 0;           // (total - header) / bound
    double offsets_ratio = 0;   // offsets / bound
};

// Approximate range emptiness filter: stores h(S) for the locality hash h in
// an exact range structure over the reduced universe [r]. Queries map the
// interval through h (at most four plain intervals) and probe the exact
// structure; never answers "empty" on an interval that intersects S.
class RangeFilter {
public:
    RangeFilter(const std::vector<uint64_t>& points, const Params& params,
                PrefixIndexKind kind = PrefixIndexKind::BinarySearch)
        : params_(params), lh_(params) {
        if (points.size() != params.n)
            throw std::invalid_argument("point count does not match params.n");
        validate_points(points, params.w);

        std::vector<uint64_t> image(points.size());
        for (size_t i = 0; i < points.size(); ++i) image[i] = lh_.eval_h(points[i]);
        std::sort(image.begin(), image.end());
        image.erase(std::unique(image.begin(), image.end()), image.end());
        exact_ = BucketedRangeStructure(image, params.r_bits, kind);
    }

    const Params& params() const { return params_; }
    const LocalityHash& hash() const { return lh_; }
    const BucketedRangeStructure& exact() const { return exact_; }
    size_t stored_count() const { return exact_.size(); }

    bool query(Interval I, QueryStats* stats = nullptr) const {
        if (!params_.in_universe(I.b))
            throw std::invalid_argument("interval outside universe");
        if (I.span() > params_.max_len - 1)
            throw std::invalid_argument("interval longer than max query length");
        for (const Interval& piece : lh_.image_of_interval(I)) {
            if (stats) ++stats->interval_probes;
            if (exact_.contains(piece, stats)) return true;
        }
        return false;
    }

    std::vector<uint8_t> serialize() const;
    static RangeFilter deserialize(std::span<const uint8_t> bytes);

    // Total byte length of the serialized filter starting at bytes[0],
    // derived from the header alone (the format is self-delimiting).
    static size_t serialized_length(std::span<const uint8_t> bytes);

    SpaceReport space_report() const;

private:
    struct FromParts {};
    RangeFilter(FromParts, const Params& params, BucketedRangeStructure exact)
        : params_(params), lh_(params), exact_(std::move(exact)) {}

    Params params_;
    LocalityHash lh_;
    BucketedRangeStructure exact_;
};

namespace detail {

constexpr char kMagic[4] = {'A', 'R', 'E', '1'};
constexpr uint8_t kVersion = 1;
constexpr uint8_t kFlagExact = 1u << 0;
constexpr uint8_t kFlagZFast = 1u << 1;
constexpr size_t kHeaderBytes = 72;

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

struct ByteReader {
    std::span<const uint8_t> data;
    size_t pos = 0;

    void need(size_t k) const {
        if (pos + k > data.size()) throw FormatError("truncated filter file");
    }
    uint8_t u8() {
        need(1);
        return data[pos++];
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data[pos++]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data[pos++]) << (8 * i);
        return v;
    }
    std::vector<uint64_t> words(size_t count) {
        std::vector<uint64_t> out(count);
        for (size_t i = 0; i < count; ++i) out[i] = u64();
        return out;
    }
};

}  // namespace detail

inline std::vector<uint8_t> RangeFilter::serialize() const {
    using namespace detail;
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(static_cast<uint8_t>(params_.w));
    uint8_t flags = 0;
    if (params_.exact) flags |= kFlagExact;
    if (exact_.index_kind() == PrefixIndexKind::ZFast) flags |= kFlagZFast;
    out.push_back(flags);
    out.push_back(0);  // reserved
    put_u64(out, params_.n);
    put_u64(out, params_.max_len);
    put_u64(out, params_.eps_num);
    put_u64(out, params_.eps_den);
    put_u64(out, params_.r_bits >= 64 ? 0 : params_.r());  // 0 encodes 2^64
    put_u64(out, params_.seed);
    put_u64(out, exact_.bucket_count());
    put_u64(out, exact_.size());

    for (uint64_t w : exact_.d1().words()) put_u64(out, w);
    for (uint64_t w : exact_.d2().words()) put_u64(out, w);
    for (uint64_t w : exact_.offsets().words()) put_u64(out, w);

    if (exact_.index_kind() == PrefixIndexKind::ZFast) {
        // Gather nodes grouped by bucket, sorted for byte-identical output.
        struct Row {
            uint32_t bucket;
            uint8_t len;
            uint64_t bits;
            ZFastIndexSet::Node node;
        };
        std::vector<Row> rows;
        rows.reserve(exact_.zfast().node_count());
        for (const auto& [key, node] : exact_.zfast().entries())
            rows.push_back({key.bucket, static_cast<uint8_t>(key.len), key.bits, node});
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            return std::tie(a.bucket, a.len, a.bits) <
                   std::tie(b.bucket, b.len, b.bits);
        });
        size_t nonempty = exact_.d1().ones();
        size_t row = 0;
        for (size_t k = 0; k < nonempty; ++k) {
            uint32_t bucket = static_cast<uint32_t>(exact_.d1().select1(k));
            size_t first = row;
            while (row < rows.size() && rows[row].bucket == bucket) ++row;
            put_u32(out, static_cast<uint32_t>(
                             (row - first) * BucketedRangeStructure::kZFastRecordBytes));
            for (size_t i = first; i < row; ++i) {
                out.push_back(rows[i].len);
                put_u32(out, rows[i].node.lo);
                put_u32(out, rows[i].node.hi);
                put_u32(out, rows[i].node.mid);
            }
        }
    }

    uint32_t crc = static_cast<uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(out.data()),
                static_cast<uInt>(out.size())));
    put_u32(out, crc);
    return out;
}

inline RangeFilter RangeFilter::deserialize(std::span<const uint8_t> bytes) {
    using namespace detail;
    ByteReader rd{bytes};
    rd.need(kHeaderBytes + 4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw FormatError("bad magic");
    {
        // Checksum first: nothing downstream has to cope with corrupt
        // payloads, only with inconsistent-but-intact ones.
        uint32_t stored = 0;
        for (int i = 0; i < 4; ++i)
            stored |= static_cast<uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
        uint32_t expect = static_cast<uint32_t>(
            ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
                    static_cast<uInt>(bytes.size() - 4)));
        if (stored != expect) throw FormatError("checksum mismatch");
    }
    rd.pos = 4;
    if (rd.u8() != kVersion) throw FormatError("unsupported version");
    unsigned w = rd.u8();
    uint8_t flags = rd.u8();
    rd.u8();  // reserved
    uint64_t n = rd.u64();
    uint64_t L = rd.u64();
    uint64_t eps_num = rd.u64();
    uint64_t eps_den = rd.u64();
    uint64_t r = rd.u64();
    uint64_t seed = rd.u64();
    uint64_t B = rd.u64();
    uint64_t m = rd.u64();

    Params params = validate_params(w, L, eps_num, eps_den, n, seed);
    uint64_t stored_r_bits = (r == 0) ? 64 : (is_pow2(r) ? *msb(r) : 0);
    if ((r == 0 && w != 64) || (r != 0 && !is_pow2(r)) ||
        stored_r_bits != params.r_bits)
        throw FormatError("r field inconsistent with parameters");
    if (((flags & kFlagExact) != 0) != params.exact)
        throw FormatError("exact-mode flag inconsistent");
    if (m > n) throw FormatError("stored image larger than point count");
    unsigned bucket_bits = BucketedRangeStructure::pick_bucket_bits(m, params.r_bits);
    if (B != (1ULL << bucket_bits)) throw FormatError("bucket count inconsistent");
    unsigned ow = params.r_bits - bucket_bits;

    BitVector d1(rd.words((B + 63) / 64), B);
    size_t nonempty = d1.ones();
    size_t d2_bits = m + nonempty;
    BitVector d2(rd.words((d2_bits + 63) / 64), d2_bits);
    PackedArray offsets(rd.words(PackedArray::word_count(m, ow)), m, ow);

    PrefixIndexKind kind = (flags & kFlagZFast) ? PrefixIndexKind::ZFast
                                                : PrefixIndexKind::BinarySearch;
    BucketedRangeStructure exact(std::move(d1), std::move(d2),
                                 std::move(offsets), params.r_bits, kind);

    if (flags & kFlagZFast) {
        for (size_t k = 0; k < nonempty; ++k) {
            uint32_t bucket = static_cast<uint32_t>(exact.d1().select1(k));
            KeyView view = exact.bucket_view(bucket);
            uint32_t blob_len = rd.u32();
            if (blob_len % BucketedRangeStructure::kZFastRecordBytes != 0)
                throw FormatError("malformed index blob");
            size_t records = blob_len / BucketedRangeStructure::kZFastRecordBytes;
            for (size_t i = 0; i < records; ++i) {
                uint8_t hlen = rd.u8();
                uint32_t lo = rd.u32();
                uint32_t hi = rd.u32();
                uint32_t mid = rd.u32();
                if (hi >= view.count || lo > hi || mid < lo || mid > hi ||
                    hlen > view.width)
                    throw FormatError("malformed index record");
                uint64_t bits =
                    hlen == 0 ? 0 : view.key(lo) >> (view.width - hlen);
                exact.zfast_mutable().insert(bucket, hlen, bits,
                                             {lo, hi, mid});
            }
        }
    }

    if (rd.pos + 4 != bytes.size()) throw FormatError("trailing bytes");

    return RangeFilter(FromParts{}, params, std::move(exact));
}

inline size_t RangeFilter::serialized_length(std::span<const uint8_t> bytes) {
    using namespace detail;
    ByteReader rd{bytes};
    rd.need(kHeaderBytes);
    rd.pos = 6;
    uint8_t flags = rd.u8();
    rd.pos = 8;
    uint64_t n = rd.u64();
    rd.pos = 40;
    uint64_t r = rd.u64();
    rd.pos = 56;
    uint64_t B = rd.u64();
    uint64_t m = rd.u64();
    if (m > n || !(r == 0 || is_pow2(r)) || !is_pow2(B))
        throw FormatError("malformed header");
    unsigned r_bits = (r == 0) ? 64 : *msb(r);
    unsigned bucket_bits = *msb(B);
    if (bucket_bits > r_bits) throw FormatError("malformed header");

    std::vector<uint64_t> d1_words = rd.words((B + 63) / 64);
    size_t nonempty = 0;
    for (uint64_t w : d1_words) nonempty += std::popcount(w);
    rd.need(((m + nonempty + 63) / 64) * 8);
    rd.pos += ((m + nonempty + 63) / 64) * 8;
    size_t off_words = PackedArray::word_count(m, r_bits - bucket_bits);
    rd.need(off_words * 8);
    rd.pos += off_words * 8;
    if (flags & kFlagZFast) {
        for (size_t k = 0; k < nonempty; ++k) {
            uint32_t blob_len = rd.u32();
            rd.need(blob_len);
            rd.pos += blob_len;
        }
    }
    rd.need(4);  // CRC
    return rd.pos + 4;
}

inline SpaceReport RangeFilter::space_report() const {
    SpaceReport rep;
    std::vector<uint8_t> bytes = serialize();
    rep.total_bits = bytes.size() * 8;
    rep.header_bits = detail::kHeaderBytes * 8 + 32;
    rep.d1_bits = exact_.d1().words().size() * 64;
    rep.d2_bits = exact_.d2().words().size() * 64;
    rep.offsets_bits = exact_.offsets().words().size() * 64;
    rep.index_bits = rep.total_bits - rep.header_bits - rep.d1_bits -
                     rep.d2_bits - rep.offsets_bits;
    double lg_len = std::log2(static_cast<double>(params_.max_len));
    double lg_eps = std::log2(static_cast<double>(params_.eps_den)) -
                    std::log2(static_cast<double>(params_.eps_num));
    rep.bound_bits = static_cast<double>(params_.n) * (lg_len + lg_eps);
    if (rep.bound_bits > 0) {
        rep.ratio = static_cast<double>(rep.total_bits - rep.header_bits) /
                    rep.bound_bits;
        rep.offsets_ratio = static_cast<double>(rep.offsets_bits) / rep.bound_bits;
    }
    return rep;
}

}  // namespace aref
