#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace aref {

// Static bit vector with rank/select directories.
//
// Layout: 512-bit superblocks carry a cumulative 64-bit count; within each
// superblock, seven 9-bit counters (packed in one word) give the rank at each
// 64-bit word boundary. Select keeps the position of every 512th one and scans
// locally from there. Directory overhead is below 0.4 bits per payload bit;
// only the payload is serialized, directories are rebuilt on load.
class BitVector {
public:
    static constexpr size_t kWordsPerSuper = 8;
    static constexpr size_t kBitsPerSuper = 64 * kWordsPerSuper;
    static constexpr size_t kSelectSample = 512;

    BitVector() = default;

    explicit BitVector(const std::vector<bool>& bits) {
        nbits_ = bits.size();
        words_.assign((nbits_ + 63) / 64, 0);
        for (size_t i = 0; i < nbits_; ++i)
            if (bits[i]) words_[i / 64] |= 1ULL << (i % 64);
        build_directories();
    }

    // Takes ownership of pre-packed words (little-endian bit order within
    // each word); any bits beyond nbits in the last word must be zero.
    BitVector(std::vector<uint64_t> words, size_t nbits)
        : words_(std::move(words)), nbits_(nbits) {
        if (words_.size() != (nbits_ + 63) / 64)
            throw std::invalid_argument("word count does not match bit length");
        if (nbits_ % 64 != 0 && !words_.empty() &&
            (words_.back() >> (nbits_ % 64)) != 0)
            throw std::invalid_argument("stray bits beyond length");
        build_directories();
    }

    size_t size() const { return nbits_; }
    size_t ones() const { return total_ones_; }
    const std::vector<uint64_t>& words() const { return words_; }

    bool bit(size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

    // Number of ones strictly before position i, 0 <= i <= size().
    size_t rank1(size_t i) const {
        if (i > nbits_) throw std::out_of_range("rank1 position past end");
        if (i == 0) return 0;
        size_t word = i / 64;
        size_t super = word / kWordsPerSuper;
        size_t within = word % kWordsPerSuper;
        size_t r = super_ranks_[super];
        if (within > 0) r += (sub_ranks_[super] >> (9 * (within - 1))) & 0x1FF;
        if (i % 64 != 0)
            r += std::popcount(words_[word] & ((1ULL << (i % 64)) - 1));
        return r;
    }

    // Position of the (j+1)-th one, 0 <= j < ones().
    size_t select1(size_t j) const {
        if (j >= total_ones_) throw std::out_of_range("select1 rank past popcount");
        size_t supers = super_ranks_.size() - 1;
        size_t lo = select_samples_[j / kSelectSample];
        size_t hi = (j / kSelectSample + 1 < select_samples_.size())
                        ? select_samples_[j / kSelectSample + 1]
                        : supers - 1;
        // Largest superblock whose cumulative rank is still <= j.
        while (lo < hi) {
            size_t mid = lo + (hi - lo + 1) / 2;
            if (super_ranks_[mid] <= j) lo = mid;
            else hi = mid - 1;
        }
        size_t count = super_ranks_[lo];
        size_t word = lo * kWordsPerSuper;
        for (;; ++word) {
            size_t pc = std::popcount(words_[word]);
            if (count + pc > j) break;
            count += pc;
        }
        uint64_t x = words_[word];
        for (size_t k = count; k < j; ++k) x &= x - 1;
        return word * 64 + std::countr_zero(x);
    }

    size_t directory_bits() const {
        return 64 * (super_ranks_.size() + sub_ranks_.size() +
                     select_samples_.size());
    }

private:
    void build_directories() {
        size_t supers = (words_.size() + kWordsPerSuper - 1) / kWordsPerSuper;
        super_ranks_.assign(supers + 1, 0);
        sub_ranks_.assign(supers, 0);
        select_samples_.clear();
        size_t count = 0;
        for (size_t s = 0; s < supers; ++s) {
            super_ranks_[s] = count;
            uint64_t packed = 0;
            size_t within = 0;
            for (size_t k = 0; k < kWordsPerSuper; ++k) {
                size_t word = s * kWordsPerSuper + k;
                if (k > 0) packed |= static_cast<uint64_t>(within) << (9 * (k - 1));
                if (word >= words_.size()) continue;
                uint64_t w = words_[word];
                while (w) {
                    if ((count + within) % kSelectSample == 0)
                        select_samples_.push_back(s);
                    w &= w - 1;
                    ++within;
                }
            }
            sub_ranks_[s] = packed;
            count += within;
        }
        super_ranks_[supers] = count;
        total_ones_ = count;
    }

    std::vector<uint64_t> words_;
    size_t nbits_ = 0;
    size_t total_ones_ = 0;
    std::vector<uint64_t> super_ranks_;       // cumulative, +1 sentinel
    std::vector<uint64_t> sub_ranks_;         // 7 x 9-bit in-super counts
    std::vector<uint64_t> select_samples_;    // superblock of every 512th one
};

}  // namespace aref
