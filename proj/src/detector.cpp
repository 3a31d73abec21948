#include "tabwm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "tabwm/intervals.hpp"
#include "tabwm/rng.hpp"

namespace tabwm {
namespace {

double unit_coordinate(double x, WatermarkMode mode) {
    return mode == WatermarkMode::unit ? x : split_fractional(x).frac;
}

void check_unit_range(const TabularDataset& ds, std::size_t col) {
    for (double x : ds.columns[col].values)
        if (x < -kEdgeTol || x > 1.0 + kEdgeTol)
            throw RangeError("unit mode requires values in [0,1]; column \"" +
                             ds.columns[col].name + "\" has " + std::to_string(x));
}

}  // namespace

std::vector<std::size_t> sample_rows(std::size_t m, std::size_t count, std::uint64_t seed) {
    count = std::min(count, m);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Stream rng(seed);
    for (std::size_t t = 0; t < count; ++t) {
        std::size_t j = t + static_cast<std::size_t>(rng.next_below(m - t));
        std::swap(idx[t], idx[j]);
    }
    idx.resize(count);
    return idx;
}

std::pair<std::size_t, std::size_t> count_green(const TabularDataset& ds, std::size_t key_col,
                                                std::size_t value_col,
                                                const WatermarkParams& params,
                                                const std::optional<RowSample>& sample) {
    if (key_col >= ds.cols() || value_col >= ds.cols() || key_col == value_col)
        throw IndexError("count_green: bad column indices");
    if (params.mode == WatermarkMode::unit) {
        check_unit_range(ds, key_col);
        check_unit_range(ds, value_col);
    }
    const auto& key = ds.columns[key_col].values;
    const auto& val = ds.columns[value_col].values;

    std::vector<std::size_t> rows;
    if (sample)
        rows = sample_rows(ds.rows(), sample->count, sample->seed);
    else {
        rows.resize(ds.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
    }

    std::vector<std::uint32_t> key_bins(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        key_bins[t] = bin_index(unit_coordinate(key[rows[t]], params.mode), params.bins);
    const GreenTable table(IntervalParams{params.bins, params.secret}, key_bins);

    long long green = 0;
#pragma omp parallel for schedule(static) reduction(+ : green)
    for (long long t = 0; t < static_cast<long long>(rows.size()); ++t) {
        const GreenSet& g = table.at(key_bins[t]);
        std::uint32_t j = bin_index(unit_coordinate(val[rows[t]], params.mode), params.bins);
        green += g.is_green(j) ? 1 : 0;
    }
    return {static_cast<std::size_t>(green), rows.size()};
}

double z_score(std::size_t green_count, std::size_t rows) {
    if (rows == 0) throw OutOfRange("z_score needs at least one row");
    double m = static_cast<double>(rows);
    return 2.0 * std::sqrt(m) * (static_cast<double>(green_count) / m - 0.5);
}

double p_value(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double min_green_count(std::size_t rows, double z_th) {
    double m = static_cast<double>(rows);
    return z_th * std::sqrt(m / 4.0) + m / 2.0;
}

DetectionReport detect_with_manifest(const TabularDataset& ds, const WatermarkManifest& manifest,
                                     std::uint64_t secret, double alpha,
                                     BonferroniDivisor divisor) {
    if (!secret_matches(manifest, secret))
        throw Error("secret does not match the manifest fingerprint");
    PairingPlan plan = plan_from_manifest(manifest, ds);
    const std::size_t n = plan.n_pairs();
    if (n == 0) throw PlanMismatch("manifest has no pairs");

    WatermarkParams params;
    params.bins = manifest.bins;
    params.secret = secret;
    params.mode = manifest.mode;

    DetectionReport report;
    report.alpha = alpha;
    report.per_test_alpha = divisor == BonferroniDivisor::pairs_squared
                                ? alpha / (static_cast<double>(n) * static_cast<double>(n))
                                : alpha / static_cast<double>(n);
    bool all_reject = true;
    for (const auto& [k, v] : plan.pairs) {
        auto [T, m] = count_green(ds, k, v, params);
        PairTestResult r{k, v, T, m, z_score(T, m), p_value(z_score(T, m))};
        all_reject = all_reject && r.p < report.per_test_alpha;
        report.results.push_back(r);
    }
    report.tests_executed = n;
    report.queries_spent = n;
    report.verdict = all_reject ? Verdict::watermarked : Verdict::not_watermarked;
    return report;
}

DetectionReport detect_blind(const TabularDataset& ds, const WatermarkParams& params,
                             const BlindOptions& options, QueryBudget* budget) {
    const std::size_t n_cols = ds.cols();
    if (n_cols < 2) throw IndexError("blind detection needs at least 2 columns");

    std::vector<std::size_t> col_order(n_cols);
    std::iota(col_order.begin(), col_order.end(), std::size_t{0});
    if (options.order == CandidateOrder::importance && options.importance)
        col_order = importance_order(*options.importance);

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    candidates.reserve(n_cols * (n_cols - 1));
    for (std::size_t a : col_order)
        for (std::size_t b : col_order)
            if (a != b) candidates.emplace_back(a, b);

    const std::size_t total = candidates.size();  // N^2 - N
    const std::size_t n_equiv = n_cols / 2;
    DetectionReport report;
    report.alpha = options.alpha;
    report.per_test_alpha =
        options.divisor == BonferroniDivisor::pairs_squared
            ? options.alpha / (static_cast<double>(n_equiv) * static_cast<double>(n_equiv))
            : options.alpha / static_cast<double>(total);

    // Sample once; every candidate is scored on the same row subset.
    const RowSample sample = options.sample;

    std::size_t next = 0;
    std::size_t ramp = 1;  // speculate little at first so early hits stay cheap
    bool stopped = false;
    while (next < total && !stopped) {
        std::size_t room = total - next;
        if (budget) {
            if (budget->spent >= budget->limit)
                throw BudgetExhausted("query budget exhausted after " +
                                          std::to_string(budget->spent) + " tests",
                                      report);
            room = std::min(room, budget->limit - budget->spent);
        }
        const std::size_t chunk = std::min(room, ramp);
        ramp = std::min<std::size_t>(ramp * 2, 16);
        std::vector<PairTestResult> chunk_results(chunk);
        // Candidates are pure given (ds, params, sample); evaluate a chunk
        // speculatively in parallel, then consume it in canonical order.
#pragma omp parallel for schedule(dynamic)
        for (long long t = 0; t < static_cast<long long>(chunk); ++t) {
            auto [k, v] = candidates[next + t];
            auto [T, m] = count_green(ds, k, v, params, sample);
            chunk_results[t] = {k, v, T, m, z_score(T, m), p_value(z_score(T, m))};
        }
        for (std::size_t t = 0; t < chunk; ++t) {
            report.results.push_back(chunk_results[t]);
            ++report.tests_executed;
            if (budget) ++budget->spent;
            if (chunk_results[t].z >= options.z_stop) {
                stopped = true;
                break;
            }
        }
        next += chunk;
    }
    report.queries_spent = report.tests_executed;
    report.verdict = stopped ? Verdict::watermarked : Verdict::not_watermarked;
    if (!stopped && budget && budget->spent >= budget->limit && report.tests_executed < total)
        throw BudgetExhausted(
            "query budget exhausted after " + std::to_string(budget->spent) + " tests", report);
    return report;
}

std::string report_to_json(const DetectionReport& report) {
    nlohmann::json j;
    j["verdict"] = report.verdict == Verdict::watermarked ? "watermarked" : "not_watermarked";
    j["alpha"] = report.alpha;
    j["per_test_alpha"] = report.per_test_alpha;
    j["tests_executed"] = report.tests_executed;
    j["queries_spent"] = report.queries_spent;
    auto results = nlohmann::json::array();
    for (const auto& r : report.results)
        results.push_back({{"key", r.key_col},
                           {"value", r.value_col},
                           {"T", r.green_count},
                           {"m", r.rows_used},
                           {"z", r.z},
                           {"p", r.p}});
    j["results"] = results;
    return j.dump(2) + "\n";
}

void save_report(const DetectionReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report: " + path.string());
    out << report_to_json(report);
}

}  // namespace tabwm
