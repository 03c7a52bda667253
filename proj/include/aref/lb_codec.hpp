#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aref/bitstream.hpp"
#include "aref/filter.hpp"
#include "aref/subset_codec.hpp"
#include "aref/wellsep.hpp"

namespace aref {

// Lossless encoding of an L-well-separated point set through a one-sided
// range emptiness filter. Stream layout: the serialized filter (self
// delimiting), then w:8, lg L:8, n:64, |T*|:64, then the rank of T_S within
// T* in ceil(lg C(|T*|, n)) bits, then one ambiguity bit per covering-level
// query where both siblings answered non-empty.
struct LbEncoding {
    std::vector<uint8_t> stream;
    uint64_t s_bits = 0;        // serialized filter
    uint64_t tstar = 0;         // top intervals answering non-empty
    uint64_t top_fps = 0;       // A = |T*| - n
    uint64_t ambiguity_bits = 0;  // B
    uint64_t subset_bits = 0;   // ceil(lg C(|T*|, n))
    uint64_t header_bits = 144;
    uint64_t total_bits = 0;    // s + header + subset + B (without padding)
};

namespace detail {

inline unsigned checked_lg(uint64_t pow2) { return *msb(pow2); }

}  // namespace detail

inline LbEncoding lb_encode(const WellSepSet& s, uint64_t eps_num,
                            uint64_t eps_den, uint64_t filter_seed,
                            PrefixIndexKind kind = PrefixIndexKind::BinarySearch) {
    Params params =
        validate_params(s.w, s.max_len, eps_num, eps_den, s.n, filter_seed);
    RangeFilter filter(s.points, params, kind);
    const uint64_t L = s.max_len;
    const unsigned lg_len = detail::checked_lg(L);
    const uint64_t tops = (1ULL << s.w) / L;

    std::vector<uint64_t> tstar_list;
    for (uint64_t j = 0; j < tops; ++j)
        if (filter.query(top_interval(j, L))) tstar_list.push_back(j);

    std::vector<uint64_t> positions(s.points.size());
    for (size_t k = 0; k < s.points.size(); ++k) {
        uint64_t j = top_index(s.points[k], L);
        auto it = std::lower_bound(tstar_list.begin(), tstar_list.end(), j);
        if (it == tstar_list.end() || *it != j)
            throw std::logic_error("occupied top interval answered empty");
        positions[k] = static_cast<uint64_t>(it - tstar_list.begin());
    }
    mpz_class rank = subset_rank(tstar_list.size(), positions);
    uint64_t subset_bits = ceil_log2(binomial(tstar_list.size(), s.n));

    std::vector<bool> ambiguity;
    for (uint64_t x : s.points) {
        for (unsigned i = lg_len; i >= 1; --i) {
            auto [left, right] = cover_intervals(x, i, L);
            bool ql = filter.query(left.to_interval());
            bool qr = filter.query(right.to_interval());
            if (ql && qr) ambiguity.push_back(right.contains(x));
        }
    }

    LbEncoding enc;
    std::vector<uint8_t> filter_bytes = filter.serialize();
    enc.s_bits = filter_bytes.size() * 8;
    enc.tstar = tstar_list.size();
    enc.top_fps = enc.tstar - s.n;
    enc.ambiguity_bits = ambiguity.size();
    enc.subset_bits = subset_bits;
    enc.total_bits = enc.s_bits + enc.header_bits + subset_bits + ambiguity.size();

    BitWriter wr;
    wr.put_bytes(filter_bytes);
    wr.put_bits(s.w, 8);
    wr.put_bits(lg_len, 8);
    wr.put_bits(s.n, 64);
    wr.put_bits(enc.tstar, 64);
    for (uint64_t k = subset_bits; k-- > 0;)
        wr.put_bit(mpz_tstbit(rank.get_mpz_t(), k));
    for (bool b : ambiguity) wr.put_bit(b);
    enc.stream = wr.take();
    return enc;
}

// Retries a few filter seeds looking for realized counts within twice their
// expectations (A <= 2 eps U/L, B <= 2 eps n lg L); falls back to the
// shortest encoding seen. Round trips hold for every seed regardless.
inline LbEncoding lb_encode_best(const WellSepSet& s, uint64_t eps_num,
                                 uint64_t eps_den, uint64_t base_seed,
                                 unsigned tries = 16) {
    double eps = static_cast<double>(eps_num) / static_cast<double>(eps_den);
    double a_cap = 2.0 * eps * static_cast<double>((1ULL << s.w) / s.max_len);
    double b_cap = 2.0 * eps * static_cast<double>(s.n) *
                   static_cast<double>(detail::checked_lg(s.max_len));
    LbEncoding best;
    bool have = false;
    for (unsigned t = 0; t < tries; ++t) {
        LbEncoding enc = lb_encode(s, eps_num, eps_den, base_seed + t);
        if (static_cast<double>(enc.top_fps) <= a_cap &&
            static_cast<double>(enc.ambiguity_bits) <= b_cap)
            return enc;
        if (!have || enc.total_bits < best.total_bits) {
            best = std::move(enc);
            have = true;
        }
    }
    return best;
}

inline std::vector<uint64_t> lb_decode(std::span<const uint8_t> stream) {
    size_t filter_len = RangeFilter::serialized_length(stream);
    BitReader rd(stream);
    RangeFilter filter = RangeFilter::deserialize(rd.get_bytes(filter_len));

    unsigned w = static_cast<unsigned>(rd.get_bits(8));
    unsigned lg_len = static_cast<unsigned>(rd.get_bits(8));
    uint64_t n = rd.get_bits(64);
    uint64_t tstar = rd.get_bits(64);
    if (w < 1 || w > 62 || lg_len >= w)
        throw std::runtime_error("malformed encoding header");
    const uint64_t L = 1ULL << lg_len;
    const uint64_t tops = (1ULL << w) / L;

    std::vector<uint64_t> tstar_list;
    for (uint64_t j = 0; j < tops; ++j)
        if (filter.query(top_interval(j, L))) tstar_list.push_back(j);
    if (tstar_list.size() != tstar)
        throw std::runtime_error("recovered T* size mismatch");

    uint64_t subset_bits = ceil_log2(binomial(tstar, n));
    mpz_class rank = 0;
    for (uint64_t k = 0; k < subset_bits; ++k)
        rank = rank * 2 + static_cast<int>(rd.get_bit());
    std::vector<uint64_t> positions = subset_unrank(tstar, n, rank);

    std::vector<uint64_t> points;
    points.reserve(n);
    for (uint64_t pos : positions) {
        uint64_t x = tstar_list[pos] * L;  // low lg L bits pending
        for (unsigned i = lg_len; i >= 1; --i) {
            auto [left, right] = cover_intervals(x, i, L);
            bool ql = filter.query(left.to_interval());
            bool qr = filter.query(right.to_interval());
            bool bit;
            if (ql && qr) bit = rd.get_bit();
            else if (ql != qr) bit = qr;
            else throw std::runtime_error("both covering queries empty");
            x |= static_cast<uint64_t>(bit) << (i - 1);
        }
        points.push_back(x);
    }
    if (rd.bits_left() >= 8)
        throw std::runtime_error("unconsumed bits after decoding");
    return points;
}

struct LbTrialReport {
    uint64_t n = 0;
    unsigned w = 0;
    uint64_t max_len = 0;
    uint64_t eps_num = 0;
    uint64_t eps_den = 0;
    uint64_t s_bits = 0;
    uint64_t top_fps = 0;
    uint64_t ambiguity_bits = 0;
    uint64_t subset_bits = 0;
    uint64_t total_bits = 0;
    int64_t lemma_floor_bits = 0;
    bool roundtrip_ok = false;
};

// One generate/encode/decode trial plus the Lemma's counting floor
// floor(n * lg((U - 4nL)/n)) for comparison with the achieved length.
inline LbTrialReport lb_trial(uint64_t n, unsigned w, uint64_t L,
                              uint64_t eps_num, uint64_t eps_den,
                              uint64_t seed) {
    WellSepSet s = gen_wellsep(n, w, L, seed);
    LbEncoding enc = lb_encode(s, eps_num, eps_den, mix64(seed, 1));

    LbTrialReport rep;
    rep.n = n;
    rep.w = w;
    rep.max_len = L;
    rep.eps_num = eps_num;
    rep.eps_den = eps_den;
    rep.s_bits = enc.s_bits;
    rep.top_fps = enc.top_fps;
    rep.ambiguity_bits = enc.ambiguity_bits;
    rep.subset_bits = enc.subset_bits;
    rep.total_bits = enc.total_bits;
    double u = static_cast<double>(1ULL << w);
    double free_space = u - 4.0 * static_cast<double>(n) * static_cast<double>(L);
    rep.lemma_floor_bits = static_cast<int64_t>(
        std::floor(static_cast<double>(n) *
                   std::log2(free_space / static_cast<double>(n))));
    rep.roundtrip_ok = lb_decode(enc.stream) == s.points;
    return rep;
}

}  // namespace aref
