#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace aref {

// Combinatorial number system: colexicographic bijection between n-element
// subsets of [m] and integers in [0, C(m, n)).

inline mpz_class binomial(uint64_t m, uint64_t n) {
    mpz_class out;
    if (n > m) return 0;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(m),
                 static_cast<unsigned long>(n));
    return out;
}

// Bits needed to store a value in [0, count): ceil(lg count).
inline uint64_t ceil_log2(const mpz_class& count) {
    if (count <= 1) return 0;
    mpz_class t = count - 1;
    return mpz_sizeinbase(t.get_mpz_t(), 2);
}

inline mpz_class subset_rank(uint64_t m, const std::vector<uint64_t>& subset) {
    mpz_class rank = 0;
    uint64_t prev = 0;
    for (size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] >= m || (i > 0 && subset[i] <= prev))
            throw std::invalid_argument("subset must be strictly increasing below m");
        rank += binomial(subset[i], i + 1);
        prev = subset[i];
    }
    return rank;
}

inline std::vector<uint64_t> subset_unrank(uint64_t m, uint64_t n,
                                           mpz_class rank) {
    if (rank >= binomial(m, n))
        throw std::invalid_argument("rank out of range");
    std::vector<uint64_t> out(n);
    uint64_t hi = m;
    for (uint64_t i = n; i >= 1; --i) {
        // Largest c with C(c, i) <= rank; search below the previous element.
        uint64_t lo = i - 1, best = i - 1;
        uint64_t a = lo, b = hi - 1;
        while (a <= b) {
            uint64_t mid = a + (b - a) / 2;
            if (binomial(mid, i) <= rank) {
                best = mid;
                a = mid + 1;
            } else {
                if (mid == 0) break;
                b = mid - 1;
            }
        }
        out[i - 1] = best;
        rank -= binomial(best, i);
        hi = best;
    }
    return out;
}

}  // namespace aref
