// Command-line front end: build/query/measure approximate range emptiness
// filters, plus the encoding demo.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "aref/bloom.hpp"
#include "aref/filter.hpp"
#include "aref/lb_codec.hpp"
#include "aref/measure.hpp"

using nlohmann::json;

namespace {

constexpr int kExitEmpty = 1;
constexpr int kExitError = 2;
constexpr int kExitTooLong = 3;

struct Epsilon {
    uint64_t num = 1;
    uint64_t den = 100;
};

Epsilon parse_epsilon(const std::string& text) {
    Epsilon e;
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        e.num = std::stoull(text.substr(0, slash));
        e.den = std::stoull(text.substr(slash + 1));
    } else {
        double v = std::stod(text);
        e.den = 1000000000ULL;
        e.num = static_cast<uint64_t>(std::llround(v * 1e9));
    }
    if (e.num == 0 || e.den == 0 || e.num >= e.den)
        throw std::invalid_argument("epsilon must satisfy 0 < eps < 1");
    uint64_t g = std::gcd(e.num, e.den);
    e.num /= g;
    e.den /= g;
    return e;
}

std::vector<uint64_t> load_points(const std::string& path) {
    std::vector<uint64_t> pts;
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".u64") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path);
        uint8_t buf[8];
        while (in.read(reinterpret_cast<char*>(buf), 8)) {
            uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
            pts.push_back(v);
        }
        if (in.gcount() != 0) throw std::runtime_error("trailing bytes in " + path);
    } else {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            size_t start = line.find_first_not_of(" \t\r");
            if (start == std::string::npos || line[start] == '#') continue;
            size_t used = 0;
            uint64_t v = std::stoull(line.substr(start), &used);
            size_t rest = line.find_first_not_of(" \t\r", start + used);
            if (rest != std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": trailing characters");
            pts.push_back(v);
        }
    }
    std::sort(pts.begin(), pts.end());
    if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
        throw std::runtime_error("duplicate points in " + path);
    return pts;
}

std::vector<uint8_t> load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

aref::RangeFilter load_filter(const std::string& path) {
    std::vector<uint8_t> bytes = load_file(path);
    return aref::RangeFilter::deserialize(bytes);
}

json space_json(const aref::SpaceReport& rep) {
    return json{{"total_bits", rep.total_bits},
                {"header_bits", rep.header_bits},
                {"d1_bits", rep.d1_bits},
                {"d2_bits", rep.d2_bits},
                {"offsets_bits", rep.offsets_bits},
                {"index_bits", rep.index_bits},
                {"bound_bits", rep.bound_bits},
                {"ratio", rep.ratio},
                {"offsets_ratio", rep.offsets_ratio}};
}

json fpr_json(const aref::FprReport& rep) {
    return json{{"trials", rep.trials},
                {"false_positives", rep.false_positives},
                {"observed_rate", rep.observed_rate},
                {"epsilon", rep.configured_epsilon},
                {"len", rep.interval_len},
                {"max_probes", rep.max_probes},
                {"mean_probes", rep.mean_probes}};
}

void print_report(const json& j, const std::string& format) {
    if (format == "json") {
        std::cout << j.dump() << "\n";
    } else if (format == "csv") {
        std::string keys, vals;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!keys.empty()) {
                keys += ",";
                vals += ",";
            }
            keys += it.key();
            vals += it.value().dump();
        }
        std::cout << keys << "\n" << vals << "\n";
    } else {
        for (auto it = j.begin(); it != j.end(); ++it)
            std::cout << it.key() << ": " << it.value().dump() << "\n";
    }
}

double percentile(std::vector<double>& v, double p) {
    size_t idx = static_cast<size_t>(p * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + idx, v.end());
    return v[idx];
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"approximate range emptiness filter"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "build a filter from a point file");
    std::string in_path, out_path, eps_text = "0.01", index_kind = "binary";
    unsigned universe_bits = 32;
    uint64_t max_len = 256, seed = 1;
    std::string format = "text";
    build->add_option("--input", in_path, "point file (.txt or .u64)")->required();
    build->add_option("--universe-bits", universe_bits, "universe bits w");
    build->add_option("--max-len", max_len, "max query length L (power of two)");
    build->add_option("--epsilon", eps_text, "false positive rate (decimal or a/b)");
    build->add_option("--seed", seed, "hash seed");
    build->add_option("--out", out_path, "output filter file")->required();
    build->add_option("--index", index_kind, "prefix index: binary|zfast");
    build->add_option("--format", format, "report format: json|csv|text");

    // query
    auto* query = app.add_subcommand("query", "range emptiness query");
    std::string filter_path;
    uint64_t qa = 0, qb = 0;
    query->add_option("filter", filter_path, "filter file")->required();
    query->add_option("--a", qa, "interval start")->required();
    query->add_option("--b", qb, "interval end")->required();

    // fpr
    auto* fpr = app.add_subcommand("fpr", "measure false positive rate");
    std::string fpr_points;
    uint64_t fpr_len = 0, fpr_trials = 100000, fpr_seed = 1;
    bool fpr_baseline = false;
    fpr->add_option("filter", filter_path, "filter file")->required();
    fpr->add_option("--points", fpr_points, "original point file")->required();
    fpr->add_option("--len", fpr_len, "interval length (default L)");
    fpr->add_option("--trials", fpr_trials, "number of sampled intervals");
    fpr->add_option("--seed", fpr_seed, "sampling seed");
    fpr->add_option("--format", format, "report format: json|csv|text");
    fpr->add_flag("--baseline", fpr_baseline, "measure the Bloom baseline instead");

    // space
    auto* space = app.add_subcommand("space", "space accounting");
    space->add_option("filter", filter_path, "filter file")->required();
    space->add_option("--format", format, "report format: json|csv|text");

    // bench
    auto* bench = app.add_subcommand("bench", "query latency and probe counts");
    std::string bench_points, bench_lens;
    uint64_t bench_trials = 10000, bench_seed = 1;
    bench->add_option("filter", filter_path, "filter file")->required();
    bench->add_option("--points", bench_points, "original point file")->required();
    bench->add_option("--lens", bench_lens, "comma-separated lengths (default 1,L/4,L)");
    bench->add_option("--trials", bench_trials, "queries per length");
    bench->add_option("--seed", bench_seed, "sampling seed");

    // lb-demo
    auto* lbdemo = app.add_subcommand("lb-demo", "encoding round-trip demo");
    uint64_t lb_n = 32, lb_len = 64, lb_sets = 5, lb_seed = 7;
    unsigned lb_w = 20;
    lbdemo->add_option("--n", lb_n, "points per set");
    lbdemo->add_option("--universe-bits", lb_w, "universe bits w");
    lbdemo->add_option("--len", lb_len, "interval length L (power of two)");
    lbdemo->add_option("--epsilon", eps_text, "false positive rate");
    lbdemo->add_option("--sets", lb_sets, "number of trials");
    lbdemo->add_option("--seed", lb_seed, "base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (build->parsed()) {
            Epsilon eps = parse_epsilon(eps_text);
            std::vector<uint64_t> pts = load_points(in_path);
            aref::Params params = aref::validate_params(
                universe_bits, max_len, eps.num, eps.den, pts.size(), seed);
            aref::PrefixIndexKind kind = index_kind == "zfast"
                                             ? aref::PrefixIndexKind::ZFast
                                             : aref::PrefixIndexKind::BinarySearch;
            aref::RangeFilter filter(pts, params, kind);
            std::vector<uint8_t> bytes = filter.serialize();
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + out_path);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
            print_report(space_json(filter.space_report()), format);
            return 0;
        }

        if (query->parsed()) {
            aref::RangeFilter filter = load_filter(filter_path);
            if (qa > qb) throw std::invalid_argument("need a <= b");
            if (qb - qa > filter.params().max_len - 1) {
                std::cerr << "interval longer than the filter's max length\n";
                return kExitTooLong;
            }
            bool hit = filter.query(aref::Interval(qa, qb));
            std::cout << (hit ? "non-empty" : "empty") << "\n";
            return hit ? 0 : kExitEmpty;
        }

        if (fpr->parsed()) {
            aref::RangeFilter filter = load_filter(filter_path);
            std::vector<uint64_t> pts = load_points(fpr_points);
            aref::SortedOracle oracle(pts);
            uint64_t len = fpr_len ? fpr_len : filter.params().max_len;
            aref::FprReport rep;
            if (fpr_baseline) {
                aref::BloomBaseline bloom(pts, filter.params());
                rep = aref::measure_fpr(bloom, oracle, filter.params(), len,
                                        fpr_trials, fpr_seed);
            } else {
                rep = aref::measure_fpr(filter, oracle, filter.params(), len,
                                        fpr_trials, fpr_seed);
            }
            print_report(fpr_json(rep), format);
            return 0;
        }

        if (space->parsed()) {
            aref::RangeFilter filter = load_filter(filter_path);
            print_report(space_json(filter.space_report()), format);
            return 0;
        }

        if (bench->parsed()) {
            aref::RangeFilter filter = load_filter(filter_path);
            std::vector<uint64_t> pts = load_points(bench_points);
            aref::BloomBaseline bloom(pts, filter.params());
            const aref::Params& p = filter.params();
            std::vector<uint64_t> lens;
            if (bench_lens.empty()) {
                lens = {1, std::max<uint64_t>(1, p.max_len / 4), p.max_len};
            } else {
                size_t pos = 0;
                while (pos < bench_lens.size()) {
                    size_t comma = bench_lens.find(',', pos);
                    if (comma == std::string::npos) comma = bench_lens.size();
                    lens.push_back(std::stoull(bench_lens.substr(pos, comma - pos)));
                    pos = comma + 1;
                }
            }
            if (bench_trials == 0)
                throw std::invalid_argument("need at least one bench query");
            json out = json::array();
            for (uint64_t len : lens) {
                if (len == 0 || len > p.max_len)
                    throw std::invalid_argument("bench length must be in 1..L");
                aref::Splitmix64 rng(bench_seed);
                uint64_t starts = (1ULL << p.w) - len + 1;
                std::vector<aref::Interval> queries;
                for (uint64_t t = 0; t < bench_trials; ++t) {
                    uint64_t a = aref::bounded_rand(rng, starts);
                    queries.emplace_back(a, a + len - 1);
                }
                // The answers feed a volatile sink so the timed work cannot
                // be optimized away.
                auto run = [&](auto&& fn) {
                    std::vector<double> ns(queries.size());
                    uint64_t hits = 0;
                    for (size_t i = 0; i < queries.size(); ++i) {
                        auto t0 = std::chrono::steady_clock::now();
                        hits += fn(queries[i]);
                        auto t1 = std::chrono::steady_clock::now();
                        ns[i] = std::chrono::duration<double, std::nano>(t1 - t0)
                                    .count();
                    }
                    volatile uint64_t keep = hits;
                    (void)keep;
                    return ns;
                };
                aref::QueryStats fstats, bstats;
                auto fns =
                    run([&](aref::Interval I) { return filter.query(I, &fstats); });
                auto bns =
                    run([&](aref::Interval I) { return bloom.query(I, &bstats); });
                out.push_back(
                    {{"len", len},
                     {"filter_median_ns", percentile(fns, 0.5)},
                     {"filter_p99_ns", percentile(fns, 0.99)},
                     {"filter_probes_per_query",
                      static_cast<double>(fstats.interval_probes) /
                          static_cast<double>(queries.size())},
                     {"baseline_median_ns", percentile(bns, 0.5)},
                     {"baseline_p99_ns", percentile(bns, 0.99)},
                     {"baseline_probes_per_query",
                      static_cast<double>(bstats.point_probes) /
                          static_cast<double>(queries.size())}});
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (lbdemo->parsed()) {
            Epsilon eps = parse_epsilon(eps_text);
            for (uint64_t t = 0; t < lb_sets; ++t) {
                aref::LbTrialReport rep = aref::lb_trial(
                    lb_n, lb_w, lb_len, eps.num, eps.den, aref::mix64(lb_seed, t));
                json j{{"n", rep.n},
                       {"w", rep.w},
                       {"L", rep.max_len},
                       {"epsilon", static_cast<double>(rep.eps_num) /
                                       static_cast<double>(rep.eps_den)},
                       {"s_bits", rep.s_bits},
                       {"A", rep.top_fps},
                       {"B", rep.ambiguity_bits},
                       {"subset_bits", rep.subset_bits},
                       {"total_bits", rep.total_bits},
                       {"lemma_floor_bits", rep.lemma_floor_bits},
                       {"roundtrip_ok", rep.roundtrip_ok}};
                std::cout << j.dump() << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
