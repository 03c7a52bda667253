#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace aref {

// MSB-first bit packing for the encoding streams. Byte-granular payloads can
// be interleaved as long as the cursor is byte-aligned at that point.
class BitWriter {
public:
    void put_bit(bool b) {
        if (fill_ == 0) bytes_.push_back(0);
        bytes_.back() |= static_cast<uint8_t>(b) << (7 - fill_);
        fill_ = (fill_ + 1) % 8;
    }

    void put_bits(uint64_t value, unsigned width) {
        for (unsigned i = width; i-- > 0;) put_bit((value >> i) & 1);
    }

    void put_bytes(std::span<const uint8_t> data) {
        if (fill_ != 0) throw std::logic_error("byte write on unaligned stream");
        bytes_.insert(bytes_.end(), data.begin(), data.end());
    }

    size_t bit_count() const {
        return bytes_.size() * 8 - (fill_ == 0 ? 0 : 8 - fill_);
    }

    std::vector<uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<uint8_t> bytes_;
    unsigned fill_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const uint8_t> data) : data_(data) {}

    bool get_bit() {
        if (pos_ >= data_.size() * 8)
            throw std::runtime_error("bit stream exhausted");
        bool b = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1;
        ++pos_;
        return b;
    }

    uint64_t get_bits(unsigned width) {
        uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) v = (v << 1) | get_bit();
        return v;
    }

    std::span<const uint8_t> get_bytes(size_t count) {
        if (pos_ % 8 != 0) throw std::logic_error("byte read on unaligned stream");
        if (pos_ / 8 + count > data_.size())
            throw std::runtime_error("bit stream exhausted");
        auto out = data_.subspan(pos_ / 8, count);
        pos_ += count * 8;
        return out;
    }

    size_t bit_pos() const { return pos_; }
    size_t bits_left() const { return data_.size() * 8 - pos_; }

private:
    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace aref
