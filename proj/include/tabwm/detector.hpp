#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tabwm/dataset.hpp"
#include "tabwm/embedder.hpp"
#include "tabwm/pairing.hpp"

namespace tabwm {

/// Seeded without-replacement row subsample for cheap detection probes.
struct RowSample {
    std::size_t count = 24;
    std::uint64_t seed = 0;
};

struct PairTestResult {
    std::size_t key_col = 0;
    std::size_t value_col = 0;
    std::size_t green_count = 0;  // T
    std::size_t rows_used = 0;    // m
    double z = 0.0;
    double p = 1.0;
};

enum class Verdict { watermarked, not_watermarked };

struct DetectionReport {
    Verdict verdict = Verdict::not_watermarked;
    std::vector<PairTestResult> results;
    std::size_t tests_executed = 0;
    double alpha = 0.05;
    double per_test_alpha = 0.05;
    std::size_t queries_spent = 0;
};

struct QueryBudget {
    std::size_t limit = 0;
    std::size_t spent = 0;
};

/// Raised when a blind search hits its query limit before reaching a verdict.
struct BudgetExhausted : Error {
    BudgetExhausted(std::string msg, DetectionReport partial)
        : Error(std::move(msg)), report(std::move(partial)) {}
    DetectionReport report;
};

/// Counts value cells whose bin is green under the row's key-derived
/// coloring. Returns (T, rows tested).
std::pair<std::size_t, std::size_t> count_green(const TabularDataset& ds, std::size_t key_col,
                                                std::size_t value_col,
                                                const WatermarkParams& params,
                                                const std::optional<RowSample>& sample = {});

/// One-proportion statistic 2*sqrt(m)*(T/m - 1/2).
double z_score(std::size_t green_count, std::size_t rows);

/// One-sided normal tail 1 - Phi(z), via the erf-based cdf (std::erfc);
/// absolute error well under 1e-7.
double p_value(double z);

/// Minimum green count for the z statistic to reach z_th:
/// z_th*sqrt(m/4) + m/2 (real-valued; callers ceil as needed).
double min_green_count(std::size_t rows, double z_th);

enum class BonferroniDivisor { pairs_squared, tests_executed };

/// Owner-side detection: tests every manifest pair at alpha divided across
/// the test family; watermarked only when all pairs reject.
DetectionReport detect_with_manifest(const TabularDataset& ds, const WatermarkManifest& manifest,
                                     std::uint64_t secret, double alpha,
                                     BonferroniDivisor divisor = BonferroniDivisor::pairs_squared);

enum class CandidateOrder { importance, index };

struct BlindOptions {
    double alpha = 0.05;
    double z_stop = 4.0;
    RowSample sample{24, 0};
    CandidateOrder order = CandidateOrder::index;
    std::optional<ImportanceVector> importance;
    BonferroniDivisor divisor = BonferroniDivisor::pairs_squared;
};

/// Key/value pair search without a manifest: walks all N^2-N ordered column
/// pairs, stopping at the first z >= z_stop. Candidates are evaluated
/// speculatively in parallel chunks capped by the remaining budget; the
/// reported counts follow the canonical serial order, so reports are
/// identical for any thread count. Throws BudgetExhausted when the budget
/// runs out before a decision.
DetectionReport detect_blind(const TabularDataset& ds, const WatermarkParams& params,
                             const BlindOptions& options, QueryBudget* budget = nullptr);

std::string report_to_json(const DetectionReport& report);
void save_report(const DetectionReport& report, const std::filesystem::path& path);

/// Seeded without-replacement sample of `count` indices from [0, m).
std::vector<std::size_t> sample_rows(std::size_t m, std::size_t count, std::uint64_t seed);

}  // namespace tabwm
