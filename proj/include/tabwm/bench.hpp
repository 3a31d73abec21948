#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tabwm/pairing.hpp"

namespace tabwm::bench {

struct BenchSpec {
    std::string name;  // fidelity_sweep | z_vs_rows | noise_sweep |
                       // pairing_preservation | spoof_curve
    std::size_t trials = 5;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "bench_out";
};

// Each experiment returns its aggregated grid and, via run_bench, also lands
// on disk as <out_dir>/<name>/<grid-point>.csv plus a summary.json carrying
// the full configuration.

struct FidelityPoint {
    std::uint32_t bins;
    double bin_size;
    double mean_mse, std_mse;
    double mean_linf;
    std::vector<double> trial_mse;
};

/// 2000x2 standard-Gaussian data, min-max normalized, one watermarked column;
/// fidelity metrics across bin sizes 1e-1 .. 1e-4.
std::vector<FidelityPoint> fidelity_sweep(std::size_t trials, std::uint64_t seed);

struct ZRowsPoint {
    std::size_t rows;
    double mean_z;
    double expected;  // sqrt(m) when fully watermarked
    std::vector<double> trial_z;
};

/// 50-column uniform data, every pair watermarked; the attainable z ceiling
/// as the row count grows from 20 to 100.
std::vector<ZRowsPoint> z_vs_rows(std::size_t trials, std::uint64_t seed);

struct NoisePoint {
    std::uint32_t bins;
    double sigma;
    double mean_z, std_z;
    std::vector<double> trial_z;
};

/// Gaussian noise of growing sigma applied to the whole watermarked dataset;
/// post-attack z per (bin count, sigma) cell.
std::vector<NoisePoint> noise_sweep(std::size_t trials, std::uint64_t seed);

struct PreservationPoint {
    PairScheme scheme;
    std::size_t kept;
    double mc_mean, mc_std;
    double closed_form;
};

/// 50 columns, top-k cut for k in {10,20,30,40}: Monte Carlo preserved-pair
/// counts for uniform and importance-driven pairing next to the closed forms.
std::vector<PreservationPoint> pairing_preservation(std::size_t trials, std::uint64_t seed);

struct SpoofPoint {
    double fraction;
    double baseline_p_mean;
    double pairwise_p_mean;
    std::vector<double> baseline_p;
    std::vector<double> pairwise_p;
};

/// Fractional-replacement forgery sweep against the single-coloring baseline
/// and the pairwise scheme.
std::vector<SpoofPoint> spoof_curve(std::size_t trials, std::uint64_t seed);

/// Dispatches by spec.name and writes the report files.
void run_bench(const BenchSpec& spec);

}  // namespace tabwm::bench
