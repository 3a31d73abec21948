#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabwm/dataset.hpp"
#include "tabwm/intervals.hpp"
#include "tabwm/pairing.hpp"

namespace tabwm {

enum class WatermarkMode { unit, fractional };

std::string to_string(WatermarkMode m);
WatermarkMode watermark_mode_from_string(const std::string& s);

struct WatermarkParams {
    std::uint32_t bins = 100;
    std::uint64_t secret = 0;
    WatermarkMode mode = WatermarkMode::fractional;
    // Fixed seed makes embedding bit-reproducible; unset draws a fresh one.
    std::optional<std::uint64_t> replacement_seed;
};

/// Owner-side record of everything needed to re-run detection. The secret
/// itself is never stored, only a one-way fingerprint.
struct WatermarkManifest {
    int version = 1;
    std::uint32_t bins = 100;
    std::string secret_id;  // hex of mix64(secret)
    WatermarkMode mode = WatermarkMode::fractional;
    PairScheme scheme = PairScheme::uniform;
    std::uint64_t rng_seed = 0;
    std::vector<std::pair<std::string, std::string>> pairs;  // (key name, value name)
    std::map<std::string, AffineMap> column_maps;
    std::string created;  // ISO-8601 UTC; honors SOURCE_DATE_EPOCH
};

/// Word -> uniform replacement inside green bin j (1-based) of b bins.
/// Samples at least kEdgeMargin bin widths away from either edge so the
/// result stays in bin j through reassembly and text round trips.
inline constexpr double kEdgeMargin = 1e-6;
double embed_element(double x, const GreenSet& g, std::uint64_t word);

/// Runs the watermark over every (key, value) pair: each value cell whose bin
/// is red under its row's key-derived coloring moves into the nearest green
/// bin. Key columns and unpaired columns are returned untouched.
std::pair<TabularDataset, WatermarkManifest> embed(const TabularDataset& ds,
                                                   const PairingPlan& plan,
                                                   const WatermarkParams& params);

/// High-probability ceiling on the largest per-cell shift: log2(m*n/delta)/b.
double max_distortion_bound(std::size_t m, std::size_t n_pairs, std::uint32_t b, double delta);

std::string manifest_to_json(const WatermarkManifest& manifest);
void save_manifest(const WatermarkManifest& manifest, const std::filesystem::path& path);
WatermarkManifest load_manifest(const std::filesystem::path& path);

/// Resolves a manifest's pair names against a dataset; throws PlanMismatch if
/// any column is missing.
PairingPlan plan_from_manifest(const WatermarkManifest& manifest, const TabularDataset& ds);

/// Checks a secret against the manifest fingerprint.
bool secret_matches(const WatermarkManifest& manifest, std::uint64_t secret);

/// Per-cell replacement word; pure in (seed, pair, row).
std::uint64_t cell_word(std::uint64_t replacement_seed, std::size_t pair_idx, std::size_t row);

}  // namespace tabwm
