#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tabwm/dataset.hpp"

namespace tabwm {

/// max |X - Xw| over all cells (or a column subset).
double linf_distance(const TabularDataset& x, const TabularDataset& xw,
                     const std::optional<std::vector<std::size_t>>& cols = {});

/// mean (X - Xw)^2 over all cells (or a column subset, e.g. value columns).
double mse(const TabularDataset& x, const TabularDataset& xw,
           const std::optional<std::vector<std::size_t>>& cols = {});

/// Row-coupled distance ((1/m) * sum_j ||X[j,:] - Xw[j,:]||_2^k)^{1/k}.
/// An upper bound on the k-Wasserstein distance between the empirical
/// distributions (identity coupling), not the distance itself.
double wasserstein_rowwise(const TabularDataset& x, const TabularDataset& xw, int k);

/// Closed-form ceiling sqrt(2n) * log2(m*n/delta) / b; k-independent.
double wasserstein_bound(std::size_t m, std::size_t n_pairs, std::uint32_t b, double delta);

struct FidelityReport {
    double linf = 0.0;
    double mse = 0.0;
    double wasserstein_k = 0.0;
    double bound_linf = 0.0;
    double bound_wasserstein = 0.0;
    bool linf_within_bound = false;
    bool wasserstein_within_bound = false;
};

/// Compares a dataset against its watermarked version. `value_cols` scopes
/// the MSE to the rewritten columns when provided; linf always covers all.
FidelityReport fidelity_report(const TabularDataset& x, const TabularDataset& xw,
                               std::size_t n_pairs, std::uint32_t b, double delta, int k = 1,
                               const std::optional<std::vector<std::size_t>>& value_cols = {});

}  // namespace tabwm
