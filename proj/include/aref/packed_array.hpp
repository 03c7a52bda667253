#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace aref {

// Flat array of n fixed-width bit fields packed LSB-first into 64-bit words.
// Width 0 is allowed (every element reads as 0 and nothing is stored).
class PackedArray {
public:
    PackedArray() = default;

    PackedArray(size_t count, unsigned width) : count_(count), width_(width) {
        if (width > 64) throw std::invalid_argument("field width above 64");
        words_.assign(word_count(count, width), 0);
    }

    PackedArray(std::vector<uint64_t> words, size_t count, unsigned width)
        : words_(std::move(words)), count_(count), width_(width) {
        if (width > 64) throw std::invalid_argument("field width above 64");
        if (words_.size() != word_count(count, width))
            throw std::invalid_argument("word count does not match layout");
    }

    static size_t word_count(size_t count, unsigned width) {
        unsigned __int128 bits = static_cast<unsigned __int128>(count) * width;
        return static_cast<size_t>((bits + 63) / 64);
    }

    size_t size() const { return count_; }
    unsigned width() const { return width_; }
    const std::vector<uint64_t>& words() const { return words_; }
    size_t payload_bits() const { return count_ * width_; }

    uint64_t get(size_t i) const {
        if (width_ == 0) return 0;
        size_t bit = i * width_;
        size_t word = bit / 64;
        unsigned off = bit % 64;
        uint64_t v = words_[word] >> off;
        if (off + width_ > 64) v |= words_[word + 1] << (64 - off);
        return v & mask();
    }

    void set(size_t i, uint64_t value) {
        if (width_ == 0) return;
        value &= mask();
        size_t bit = i * width_;
        size_t word = bit / 64;
        unsigned off = bit % 64;
        words_[word] = (words_[word] & ~(mask() << off)) | (value << off);
        if (off + width_ > 64) {
            unsigned spill = off + width_ - 64;
            uint64_t hi_mask = (1ULL << spill) - 1;
            words_[word + 1] =
                (words_[word + 1] & ~hi_mask) | (value >> (64 - off));
        }
    }

private:
    uint64_t mask() const {
        return width_ >= 64 ? ~0ULL : (1ULL << width_) - 1;
    }

    std::vector<uint64_t> words_;
    size_t count_ = 0;
    unsigned width_ = 0;
};

}  // namespace aref
