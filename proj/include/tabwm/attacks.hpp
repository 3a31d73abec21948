#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tabwm/dataset.hpp"
#include "tabwm/detector.hpp"
#include "tabwm/pairing.hpp"

namespace tabwm {

/// Floor-based decimal truncation: floor(10^p * x) / 10^p, toward -inf.
/// Values already on the decimal grid pass through unchanged (a small snap
/// guard absorbs the binary representation error of decimal literals).
double truncate_decimal(double x, int places);

/// Truncates every numeric cell.
TabularDataset truncate_dataset(const TabularDataset& ds, int places);

/// Closed-form probability that truncation to p places moves a value out of
/// bin j of b, given the left grid point c inside the bin:
/// ((b-1)^{10^p} + b^{10^p-1}(c*b - j + 1)) / b^{10^p}, clamped to [0,1].
/// The Monte Carlo companion below is the empirically trustworthy estimate.
double truncation_escape_prob(std::uint32_t b, int places, std::uint32_t j, double c);

/// Empirical escape probability: x uniform in bin j of b, truncated to
/// `places`, re-binned; fraction landing outside bin j.
double truncation_escape_mc(std::uint32_t b, int places, std::uint32_t j, std::uint64_t seed,
                            std::size_t samples);

enum class NoiseDist { gaussian, uniform };

NoiseDist noise_dist_from_string(const std::string& s);

/// Perturbs a seeded random ceil(fraction*m) row subset of every column.
/// Gaussian noise has standard deviation sigma; uniform noise is
/// Unif[-sigma, sigma]. clamp_unit keeps results inside [0,1].
TabularDataset add_noise(const TabularDataset& ds, NoiseDist dist, double sigma, double fraction,
                         std::uint64_t seed, bool clamp_unit = false);

/// Probability that uniform noise Unif[-sigma,sigma] pushes a green cell into
/// a red bin: 0.5 - 1/(4*b*sigma). Only defined where the value is positive.
double noise_survival_rho(std::uint32_t b, double sigma);

/// Expected number of cells the attacker must perturb to pull the z statistic
/// under z_th: (m - n_alpha) / rho.
double expected_attacked_cells(std::size_t rows, double z_th, double rho);

/// Keeps the round(keep_fraction * cols) highest-importance columns, original
/// order preserved.
TabularDataset drop_columns(const TabularDataset& ds, const ImportanceVector& imp,
                            double keep_fraction);

/// Fractional-replacement forgery: a seeded random subset of ceil(fraction *
/// m * cols) cells of S gets its fractional part swapped for the nearest
/// fractional part pooled from W. Negative cells reassemble as floor(x) - f.
TabularDataset spoof_fractional(const TabularDataset& S, const TabularDataset& W, double fraction,
                                std::uint64_t seed);

/// Simplified single-coloring scheme used as the spoofing comparison target:
/// one global green set over fractional parts, applied to every cell.
struct BaselineParams {
    std::uint32_t bins = 100;
    std::uint64_t secret = 0;
};

TabularDataset baseline_embed(const TabularDataset& ds, const BaselineParams& params,
                              std::optional<std::uint64_t> replacement_seed = {});

/// Pooled one-proportion test over all cells against the global green set.
DetectionReport baseline_detect(const TabularDataset& ds, const BaselineParams& params,
                                double alpha);

}  // namespace tabwm
