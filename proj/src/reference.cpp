#include "tabwm/reference.hpp"

#include <cmath>

namespace tabwm::reference {
namespace {

double unit_coordinate(double x, WatermarkMode mode) {
    return mode == WatermarkMode::unit ? x : split_fractional(x).frac;
}

}  // namespace

NearestGreen nearest_green_scan(double x, const GreenSet& g) {
    const std::uint32_t b = g.bins();
    const double t = x * static_cast<double>(b) + 0.5;
    std::uint32_t best = 0;
    double best_dist = 0.0;
    for (std::uint32_t j : g.green_bins()) {
        double d = std::abs(t - static_cast<double>(j));
        if (best == 0 || d < best_dist) {
            best = j;
            best_dist = d;
        }
    }
    return {best, g.is_green(bin_index(x, b))};
}

TabularDataset embed_serial(const TabularDataset& ds, const PairingPlan& plan,
                            const WatermarkParams& params, std::uint64_t replacement_seed) {
    TabularDataset out = ds;
    const std::size_t m = ds.rows();
    const IntervalParams iparams{params.bins, params.secret};
    for (std::size_t p = 0; p < plan.pairs.size(); ++p) {
        const auto [key_col, value_col] = plan.pairs[p];
        const auto& key = ds.columns[key_col].values;
        auto& val = out.columns[value_col].values;
        for (std::size_t r = 0; r < m; ++r) {
            std::uint32_t kb = bin_index(unit_coordinate(key[r], params.mode), params.bins);
            GreenSet g = green_set(seed_for_bin(iparams, kb), params.bins);
            double x = val[r];
            if (params.mode == WatermarkMode::unit) {
                val[r] = embed_element(x, g, cell_word(replacement_seed, p, r));
            } else {
                auto [ip, frac] = split_fractional(x);
                if (g.is_green(bin_index(frac, params.bins))) continue;
                std::uint32_t j = nearest_green_scan(frac, g).bin;
                double fw = embed_element(frac, g, cell_word(replacement_seed, p, r));
                double xw = ip + fw;
                if (bin_index(split_fractional(xw).frac, params.bins) != j) {
                    xw = ip + bin_center(j, params.bins);
                    if (bin_index(split_fractional(xw).frac, params.bins) != j) xw = x;
                }
                val[r] = xw;
            }
        }
        out.columns[value_col].text.clear();
    }
    return out;
}

std::pair<std::size_t, std::size_t> count_green_serial(const TabularDataset& ds,
                                                       std::size_t key_col,
                                                       std::size_t value_col,
                                                       const WatermarkParams& params) {
    const std::size_t m = ds.rows();
    const IntervalParams iparams{params.bins, params.secret};
    const auto& key = ds.columns[key_col].values;
    const auto& val = ds.columns[value_col].values;
    std::size_t green = 0;
    for (std::size_t r = 0; r < m; ++r) {
        std::uint32_t kb = bin_index(unit_coordinate(key[r], params.mode), params.bins);
        GreenSet g = green_set(seed_for_bin(iparams, kb), params.bins);
        std::uint32_t j = bin_index(unit_coordinate(val[r], params.mode), params.bins);
        if (g.is_green(j)) ++green;
    }
    return {green, m};
}

}  // namespace tabwm::reference
