#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tabwm/errors.hpp"
#include "tabwm/rng.hpp"

namespace tabwm {

struct IntervalParams {
    std::uint32_t bins = 100;   // b >= 2
    std::uint64_t secret = 0;  // optional key material
};

/// Balanced red/green labeling of b bins: exactly floor(b/2) bins are green.
class GreenSet {
public:
    GreenSet(std::uint32_t bins, std::vector<std::uint32_t> greens_sorted);

    std::uint32_t bins() const { return bins_; }
    std::uint32_t green_count() const { return static_cast<std::uint32_t>(greens_.size()); }

    /// j is 1-based.
    bool is_green(std::uint32_t j) const {
        return (bits_[(j - 1) >> 6] >> ((j - 1) & 63)) & 1u;
    }

    /// Sorted 1-based green bin indices.
    const std::vector<std::uint32_t>& green_bins() const { return greens_; }

private:
    std::uint32_t bins_;
    std::vector<std::uint32_t> greens_;
    std::vector<std::uint64_t> bits_;
};

// Values within kGridSnap of a bin boundary (measured in bin widths) are
// assigned to the bin owning that boundary. Absorbs the rounding that decimal
// grids pick up through scaling, reassembly and formatting round trips.
inline constexpr double kGridSnap = 1e-9;
inline constexpr double kEdgeTol = 1e-12;

/// 1-based bin of x in [0,1]: floor(x*b)+1, last bin closed at 1.
std::uint32_t bin_index(double x, std::uint32_t b);

/// Center of bin j: (j - 0.5) / b.
double bin_center(std::uint32_t j, std::uint32_t b);

/// Per-bin seed: mix64(mix64(secret ^ golden) ^ j). Stable across platforms.
std::uint64_t seed_for_bin(const IntervalParams& params, std::uint32_t j);

/// Deterministic labeling from a seed: Fisher-Yates over [1..b] driven by the
/// counter stream mix64(seed + i*golden), first floor(b/2) slots are green.
GreenSet green_set(std::uint64_t seed, std::uint32_t b);

struct NearestGreen {
    std::uint32_t bin;   // green bin whose center is closest to x
    bool already_green;  // bin_index(x) itself is green
};

/// Closest green bin by center distance; ties go to the lower index.
NearestGreen nearest_green(double x, const GreenSet& g);

/// Green sets for the key bins of one column, built once and then shared
/// read-only across row workers.
class GreenTable {
public:
    GreenTable(const IntervalParams& params, std::span<const std::uint32_t> bins_needed);

    const GreenSet& at(std::uint32_t j) const { return sets_[slot_[j - 1]]; }
    std::uint32_t bins() const { return params_.bins; }

private:
    IntervalParams params_;
    std::vector<std::uint32_t> slot_;  // bin-1 -> index into sets_
    std::vector<GreenSet> sets_;
};

}  // namespace tabwm
