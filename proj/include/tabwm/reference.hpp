#pragma once

// Straight-line serial implementations of the embedding and counting kernels.
// They share no code with the OpenMP paths beyond the seeding primitives and
// exist so tests can assert the parallel kernels bit-for-bit and the
// benchmark can measure the speedup.

#include <cstdint>

#include "tabwm/dataset.hpp"
#include "tabwm/detector.hpp"
#include "tabwm/embedder.hpp"
#include "tabwm/intervals.hpp"
#include "tabwm/pairing.hpp"

namespace tabwm::reference {

/// Exhaustive argmin over all green centers; ties to the lower index.
NearestGreen nearest_green_scan(double x, const GreenSet& g);

/// Row-by-row serial embedding; must produce byte-identical output to embed()
/// given the same replacement seed.
TabularDataset embed_serial(const TabularDataset& ds, const PairingPlan& plan,
                            const WatermarkParams& params, std::uint64_t replacement_seed);

/// Serial green counting over all rows.
std::pair<std::size_t, std::size_t> count_green_serial(const TabularDataset& ds,
                                                       std::size_t key_col,
                                                       std::size_t value_col,
                                                       const WatermarkParams& params);

}  // namespace tabwm::reference
