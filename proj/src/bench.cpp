#include "tabwm/bench.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tabwm/attacks.hpp"
#include "tabwm/detector.hpp"
#include "tabwm/embedder.hpp"
#include "tabwm/metrics.hpp"
#include "tabwm/rng.hpp"
#include "tabwm/synth.hpp"

namespace tabwm::bench {
namespace {

constexpr std::uint32_t kBinGrid[] = {10, 100, 1000, 10000};
constexpr double kSigmaGrid[] = {1e-3, 1e-2, 1e-1};
constexpr std::size_t kPreservationColumns = 50;
constexpr std::size_t kPreservationKept[] = {10, 20, 30, 40};

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size());
    return {mean, std::sqrt(var)};
}

/// 2000x2 Gaussian data with both columns min-max normalized into [0,1] and a
/// single (key, value) pair, as the synthetic fidelity/noise experiments use.
std::pair<TabularDataset, PairingPlan> gaussian_pair_dataset(std::uint64_t seed) {
    auto ds = gaussian_dataset(2000, 2, seed);
    ds = normalize_unit(ds, 0).first;
    ds = normalize_unit(ds, 1).first;
    PairingPlan plan;
    plan.pairs = {{0, 1}};
    plan.scheme = PairScheme::uniform;
    plan.rng_seed = seed;
    return {std::move(ds), std::move(plan)};
}

void write_point_csv(const std::filesystem::path& dir, const std::string& stem,
                     const std::string& header, const std::vector<double>& rows) {
    std::ofstream out(dir / (stem + ".csv"), std::ios::binary);
    out << "trial," << header << "\n";
    for (std::size_t t = 0; t < rows.size(); ++t) out << t + 1 << "," << rows[t] << "\n";
}

}  // namespace

std::vector<FidelityPoint> fidelity_sweep(std::size_t trials, std::uint64_t seed) {
    std::vector<FidelityPoint> points;
    for (std::uint32_t b : kBinGrid) {
        FidelityPoint p{};
        p.bins = b;
        p.bin_size = 1.0 / static_cast<double>(b);
        std::vector<double> linfs;
        for (std::size_t t = 0; t < trials; ++t) {
            auto [ds, plan] = gaussian_pair_dataset(mix64(seed + t));
            WatermarkParams params;
            params.bins = b;
            params.mode = WatermarkMode::unit;
            params.replacement_seed = mix64(seed ^ mix64(t + 1));
            auto [wm, manifest] = embed(ds, plan, params);
            p.trial_mse.push_back(mse(ds, wm, std::vector<std::size_t>{1}));
            linfs.push_back(linf_distance(ds, wm));
        }
        std::tie(p.mean_mse, p.std_mse) = mean_std(p.trial_mse);
        p.mean_linf = mean_std(linfs).first;
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<ZRowsPoint> z_vs_rows(std::size_t trials, std::uint64_t seed) {
    std::vector<ZRowsPoint> points;
    for (std::size_t m = 20; m <= 100; m += 10) {
        ZRowsPoint p{};
        p.rows = m;
        p.expected = std::sqrt(static_cast<double>(m));
        for (std::size_t t = 0; t < trials; ++t) {
            std::uint64_t s = mix64(seed + m * 131 + t);
            auto ds = uniform_dataset(m, 50, s);
            auto plan = pair_uniform(50, s);
            WatermarkParams params;
            params.mode = WatermarkMode::unit;
            params.replacement_seed = mix64(s + 1);
            auto [wm, manifest] = embed(ds, plan, params);
            double zsum = 0.0;
            for (const auto& [k, v] : plan.pairs) {
                auto [T, rows] = count_green(wm, k, v, params);
                zsum += z_score(T, rows);
            }
            p.trial_z.push_back(zsum / static_cast<double>(plan.n_pairs()));
        }
        p.mean_z = mean_std(p.trial_z).first;
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<NoisePoint> noise_sweep(std::size_t trials, std::uint64_t seed) {
    std::vector<NoisePoint> points;
    for (std::uint32_t b : kBinGrid) {
        for (double sigma : kSigmaGrid) {
            NoisePoint p{};
            p.bins = b;
            p.sigma = sigma;
            for (std::size_t t = 0; t < trials; ++t) {
                auto [ds, plan] = gaussian_pair_dataset(mix64(seed + t));
                WatermarkParams params;
                params.bins = b;
                params.mode = WatermarkMode::unit;
                params.replacement_seed = mix64(seed ^ mix64(t + 17));
                auto [wm, manifest] = embed(ds, plan, params);
                auto attacked = add_noise(wm, NoiseDist::gaussian, sigma, 1.0,
                                          mix64(seed + 997 * t + b), /*clamp_unit=*/true);
                auto [T, rows] = count_green(attacked, 0, 1, params);
                p.trial_z.push_back(z_score(T, rows));
            }
            std::tie(p.mean_z, p.std_z) = mean_std(p.trial_z);
            points.push_back(std::move(p));
        }
    }
    return points;
}

std::vector<PreservationPoint> pairing_preservation(std::size_t trials, std::uint64_t seed) {
    const std::size_t cols = kPreservationColumns;
    ImportanceVector imp;
    imp.scores.resize(cols);
    for (std::size_t c = 0; c < cols; ++c)
        imp.scores[c] = static_cast<double>(cols - c);  // strictly decreasing

    auto preserved = [&](const PairingPlan& plan, std::size_t k) {
        // Columns are already in descending importance order, so the top-k
        // cut keeps indices 0..k-1.
        std::size_t count = 0;
        for (const auto& [a, b] : plan.pairs)
            if (a < k && b < k) ++count;
        return count;
    };

    std::vector<PreservationPoint> points;
    for (PairScheme scheme : {PairScheme::uniform, PairScheme::fi_sampled}) {
        std::vector<std::vector<double>> counts(std::size(kPreservationKept));
        for (auto& c : counts) c.resize(trials);
#pragma omp parallel for schedule(static)
        for (long long t = 0; t < static_cast<long long>(trials); ++t) {
            PairingPlan plan = scheme == PairScheme::uniform
                                   ? pair_uniform(cols, mix64(seed + t))
                                   : pair_by_importance(imp, scheme, mix64(seed + t));
            for (std::size_t ki = 0; ki < std::size(kPreservationKept); ++ki)
                counts[ki][t] = static_cast<double>(preserved(plan, kPreservationKept[ki]));
        }
        for (std::size_t ki = 0; ki < std::size(kPreservationKept); ++ki) {
            PreservationPoint p{};
            p.scheme = scheme;
            p.kept = kPreservationKept[ki];
            std::tie(p.mc_mean, p.mc_std) = mean_std(counts[ki]);
            p.closed_form = expected_preserved_pairs(scheme, cols / 2, p.kept);
            points.push_back(p);
        }
    }
    return points;
}

std::vector<SpoofPoint> spoof_curve(std::size_t trials, std::uint64_t seed) {
    std::vector<SpoofPoint> points;
    for (int fi = 0; fi <= 5; ++fi) {
        SpoofPoint p{};
        p.fraction = 0.2 * fi;
        points.push_back(std::move(p));
    }
    for (std::size_t t = 0; t < trials; ++t) {
        std::uint64_t s = mix64(seed + 31 * t);
        // Original data with rich fractional parts, its two watermarked
        // versions, and an independent synthetic stand-in of the original.
        auto original = gaussian_dataset(2000, 2, s, 5.0, 2.0);
        auto synthetic = gaussian_dataset(2000, 2, mix64(s + 1), 5.0, 2.0);

        PairingPlan plan;
        plan.pairs = {{0, 1}};
        plan.scheme = PairScheme::uniform;
        plan.rng_seed = s;
        WatermarkParams params;
        params.bins = 100;
        params.mode = WatermarkMode::fractional;
        params.replacement_seed = mix64(s + 2);
        auto [w_pair, manifest] = embed(original, plan, params);

        BaselineParams base;
        base.bins = 100;
        base.secret = 0;
        auto w_base = baseline_embed(original, base, mix64(s + 3));

        for (auto& point : points) {
            auto forged_base = spoof_fractional(synthetic, w_base, point.fraction, mix64(s + 5));
            point.baseline_p.push_back(baseline_detect(forged_base, base, 0.05).results[0].p);
            auto forged_pair = spoof_fractional(synthetic, w_pair, point.fraction, mix64(s + 6));
            auto report = detect_with_manifest(forged_pair, manifest, 0, 0.05);
            point.pairwise_p.push_back(report.results[0].p);
        }
    }
    for (auto& p : points) {
        p.baseline_p_mean = mean_std(p.baseline_p).first;
        p.pairwise_p_mean = mean_std(p.pairwise_p).first;
    }
    return points;
}

void run_bench(const BenchSpec& spec) {
    namespace fs = std::filesystem;
    const fs::path dir = spec.out_dir / spec.name;
    fs::create_directories(dir);
    nlohmann::json summary;
    summary["config"] = {{"name", spec.name}, {"trials", spec.trials}, {"seed", spec.seed}};
    auto grid = nlohmann::json::array();

    if (spec.name == "fidelity_sweep") {
        for (const auto& p : fidelity_sweep(spec.trials, spec.seed)) {
            std::string stem = "b_" + std::to_string(p.bins);
            write_point_csv(dir, stem, "mse", p.trial_mse);
            grid.push_back({{"bins", p.bins},
                            {"bin_size", p.bin_size},
                            {"mean_mse", p.mean_mse},
                            {"std_mse", p.std_mse},
                            {"mean_linf", p.mean_linf}});
        }
    } else if (spec.name == "z_vs_rows") {
        for (const auto& p : z_vs_rows(spec.trials, spec.seed)) {
            write_point_csv(dir, "m_" + std::to_string(p.rows), "z", p.trial_z);
            grid.push_back(
                {{"rows", p.rows}, {"mean_z", p.mean_z}, {"expected_sqrt_m", p.expected}});
        }
    } else if (spec.name == "noise_sweep") {
        for (const auto& p : noise_sweep(spec.trials, spec.seed)) {
            char stem[64];
            std::snprintf(stem, sizeof stem, "b_%u_sigma_%g", p.bins, p.sigma);
            write_point_csv(dir, stem, "z", p.trial_z);
            grid.push_back({{"bins", p.bins},
                            {"sigma", p.sigma},
                            {"mean_z", p.mean_z},
                            {"std_z", p.std_z}});
        }
    } else if (spec.name == "pairing_preservation") {
        for (const auto& p : pairing_preservation(spec.trials, spec.seed)) {
            grid.push_back({{"scheme", to_string(p.scheme)},
                            {"kept", p.kept},
                            {"mc_mean", p.mc_mean},
                            {"mc_std", p.mc_std},
                            {"closed_form", p.closed_form}});
        }
    } else if (spec.name == "spoof_curve") {
        for (const auto& p : spoof_curve(spec.trials, spec.seed)) {
            char stem[64];
            std::snprintf(stem, sizeof stem, "fraction_%g", p.fraction);
            write_point_csv(dir, stem, "baseline_p", p.baseline_p);
            grid.push_back({{"fraction", p.fraction},
                            {"baseline_p_mean", p.baseline_p_mean},
                            {"pairwise_p_mean", p.pairwise_p_mean}});
        }
    } else {
        throw Error("unknown bench name: " + spec.name);
    }

    summary["grid"] = grid;
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << "\n";
}

}  // namespace tabwm::bench
