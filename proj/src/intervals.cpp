#include "tabwm/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace tabwm {

GreenSet::GreenSet(std::uint32_t bins, std::vector<std::uint32_t> greens_sorted)
    : bins_(bins), greens_(std::move(greens_sorted)), bits_((bins + 63) / 64, 0) {
    for (std::uint32_t j : greens_) bits_[(j - 1) >> 6] |= 1ull << ((j - 1) & 63);
}

std::uint32_t bin_index(double x, std::uint32_t b) {
    if (b < 2) throw OutOfRange("bin count must be >= 2");
    if (x < -kEdgeTol || x > 1.0 + kEdgeTol)
        throw OutOfRange("value " + std::to_string(x) + " outside [0,1]");
    double t = x * static_cast<double>(b);
    double r = std::nearbyint(t);
    if (std::abs(t - r) < kGridSnap) t = r;
    auto j = static_cast<long long>(std::floor(t)) + 1;
    if (j < 1) j = 1;
    if (j > b) j = b;  // x == 1.0 belongs to the last bin
    return static_cast<std::uint32_t>(j);
}

double bin_center(std::uint32_t j, std::uint32_t b) {
    return (static_cast<double>(j) - 0.5) / static_cast<double>(b);
}

std::uint64_t seed_for_bin(const IntervalParams& params, std::uint32_t j) {
    return mix64(mix64(params.secret ^ kGolden) ^ static_cast<std::uint64_t>(j));
}

GreenSet green_set(std::uint64_t seed, std::uint32_t b) {
    if (b < 2) throw OutOfRange("bin count must be >= 2");
    std::vector<std::uint32_t> perm(b);
    std::iota(perm.begin(), perm.end(), 1u);
    std::uint64_t i = 0;
    for (std::uint32_t k = b - 1; k >= 1; --k) {
        std::uint64_t r = stream_word(seed, ++i);
        std::uint32_t j = static_cast<std::uint32_t>(r % (k + 1));
        std::swap(perm[k], perm[j]);
    }
    std::vector<std::uint32_t> greens(perm.begin(), perm.begin() + b / 2);
    std::sort(greens.begin(), greens.end());
    return GreenSet(b, std::move(greens));
}

NearestGreen nearest_green(double x, const GreenSet& g) {
    const auto& greens = g.green_bins();
    if (greens.empty()) throw OutOfRange("green set has no green bins");
    const std::uint32_t b = g.bins();
    // Work in scaled coordinates: the center of bin j sits at j - 0.5, so
    // minimizing |x - center| is minimizing |x*b + 0.5 - j| over green j.
    double t = x * static_cast<double>(b) + 0.5;
    auto it = std::lower_bound(greens.begin(), greens.end(), t);
    std::uint32_t best;
    if (it == greens.begin()) {
        best = *it;
    } else if (it == greens.end()) {
        best = *(it - 1);
    } else {
        double d_lo = t - static_cast<double>(*(it - 1));
        double d_hi = static_cast<double>(*it) - t;
        best = d_lo <= d_hi ? *(it - 1) : *it;  // tie -> lower index
    }
    return {best, g.is_green(bin_index(x, b))};
}

GreenTable::GreenTable(const IntervalParams& params, std::span<const std::uint32_t> bins_needed)
    : params_(params), slot_(params.bins, 0) {
    std::vector<char> need(params.bins + 1, 0);
    for (std::uint32_t j : bins_needed) need[j] = 1;
    std::vector<std::uint32_t> order;
    for (std::uint32_t j = 1; j <= params.bins; ++j)
        if (need[j]) order.push_back(j);
    // Each entry is a pure function of (secret, b, j); build them in parallel.
    std::vector<std::optional<GreenSet>> built(order.size());
#pragma omp parallel for schedule(static)
    for (long long idx = 0; idx < static_cast<long long>(order.size()); ++idx)
        built[idx] = green_set(seed_for_bin(params_, order[idx]), params_.bins);
    sets_.reserve(order.size());
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
        slot_[order[idx] - 1] = static_cast<std::uint32_t>(sets_.size());
        sets_.push_back(std::move(*built[idx]));
    }
}

}  // namespace tabwm
