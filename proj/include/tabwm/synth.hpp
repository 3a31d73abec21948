#pragma once

// Seeded synthetic dataset generators shared by the bench harness and tests.

#include <cstdint>

#include "tabwm/dataset.hpp"

namespace tabwm {

/// m x cols with cells i.i.d. Unif[0, 1).
TabularDataset uniform_dataset(std::size_t m, std::size_t cols, std::uint64_t seed);

/// m x cols with cells i.i.d. Normal(mean, sd).
TabularDataset gaussian_dataset(std::size_t m, std::size_t cols, std::uint64_t seed,
                                double mean = 0.0, double sd = 1.0);

}  // namespace tabwm
