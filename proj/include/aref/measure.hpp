#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aref/core.hpp"
#include "aref/range_structure.hpp"
#include "aref/splitmix64.hpp"

namespace aref {

struct FprReport {
    uint64_t trials = 0;
    uint64_t false_positives = 0;
    double observed_rate = 0;
    double configured_epsilon = 0;
    uint64_t interval_len = 0;
    uint32_t max_probes = 0;
    double mean_probes = 0;
};

// Samples `trials` uniform length-len intervals disjoint from S (rejection
// against the oracle) and reports how often the structure answers non-empty.
// Per-trial randomness derives from (seed, trial index), so the result is
// independent of evaluation order.
template <class Structure>
FprReport measure_fpr(const Structure& structure, const SortedOracle& oracle,
                      const Params& params, uint64_t len, uint64_t trials,
                      uint64_t seed) {
    if (params.w >= 64)
        throw std::invalid_argument("fpr measurement supports universes below 2^64");
    if (len == 0 || len > params.max_len)
        throw std::invalid_argument("interval length must be in 1..L");
    if (trials == 0) throw std::invalid_argument("need at least one trial");
    const uint64_t universe = 1ULL << params.w;
    const uint64_t starts = universe - len + 1;
    constexpr int kRetryCap = 10000;

    FprReport rep;
    rep.trials = trials;
    rep.configured_epsilon = params.epsilon();
    rep.interval_len = len;
    uint64_t probe_total = 0;

    for (uint64_t t = 0; t < trials; ++t) {
        Splitmix64 rng(mix64(seed, t));
        Interval I;
        bool found = false;
        for (int attempt = 0; attempt < kRetryCap; ++attempt) {
            uint64_t a = bounded_rand(rng, starts);
            I = Interval(a, a + len - 1);
            if (!oracle.contains(I)) {
                found = true;
                break;
            }
        }
        if (!found)
            throw std::runtime_error(
                "could not sample an empty interval: point set too dense");
        QueryStats stats;
        if (structure.query(I, &stats)) ++rep.false_positives;
        uint32_t probes = stats.interval_probes ? stats.interval_probes
                                                : static_cast<uint32_t>(stats.point_probes);
        rep.max_probes = std::max(rep.max_probes, probes);
        probe_total += probes;
    }
    rep.observed_rate =
        static_cast<double>(rep.false_positives) / static_cast<double>(trials);
    rep.mean_probes = static_cast<double>(probe_total) / static_cast<double>(trials);
    return rep;
}

}  // namespace aref
