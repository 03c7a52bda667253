#pragma once

#include <array>
#include <cstdint>

#include "aref/splitmix64.hpp"

namespace aref {

// Simple 8x8-bit tabulation hash over 64-bit keys. 3-independent, hence
// pairwise independent, and uniform on any power-of-two range after masking.
// Tables are a pure function of the seed (splitmix64 stream, table-major,
// index-minor) so only the seed needs to be stored.
class TabulationHash {
public:
    static constexpr unsigned kTables = 8;
    static constexpr unsigned kEntries = 256;

    explicit TabulationHash(uint64_t seed) {
        Splitmix64 gen(seed);
        for (auto& table : tables_)
            for (auto& entry : table) entry = gen.next();
    }

    uint64_t eval(uint64_t key) const {
        uint64_t h = 0;
        for (unsigned t = 0; t < kTables; ++t)
            h ^= tables_[t][(key >> (8 * t)) & 0xFF];
        return h;
    }

    uint64_t raw_entry(unsigned table, unsigned index) const {
        return tables_[table][index];
    }

private:
    std::array<std::array<uint64_t, kEntries>, kTables> tables_;
};

}  // namespace aref
