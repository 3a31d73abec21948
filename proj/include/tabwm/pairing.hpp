#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tabwm/dataset.hpp"
#include "tabwm/errors.hpp"

namespace tabwm {

enum class PairScheme { uniform, fi_adjacent, fi_sampled };

std::string to_string(PairScheme s);
PairScheme pair_scheme_from_string(const std::string& s);

/// Disjoint (key, value) column pairing. Column indices are 0-based.
struct PairingPlan {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (key, value)
    PairScheme scheme = PairScheme::uniform;
    std::uint64_t rng_seed = 0;

    std::size_t n_pairs() const { return pairs.size(); }
};

struct ImportanceVector {
    std::vector<double> scores;  // one non-negative score per column
};

/// Uniformly random perfect matching on an even column count; the first
/// element of each shuffled pair acts as the key.
PairingPlan pair_uniform(std::size_t cols, std::uint64_t rng_seed);

/// Probability that ranks i and j pair under the inverse-distance rule:
/// (1/|i-j|) / sum_{l != i} 1/|i-l|. Ranks are 1-based over `total` columns
/// sorted by descending importance.
double pair_probability(std::size_t i, std::size_t j, std::size_t total);

/// Importance-driven pairing. fi_adjacent pairs consecutive ranks
/// deterministically; fi_sampled walks ranks in order and samples each
/// partner with probability proportional to 1/|rank distance|, renormalized
/// over the still-unmatched columns. The higher-importance member is the key.
PairingPlan pair_by_importance(const ImportanceVector& imp, PairScheme mode,
                               std::uint64_t rng_seed);

/// Expected pairs surviving a top-k column cut, in closed form.
/// uniform: k(k-1)/(2(2n-1)); fi_sampled: the harmonic-number expression
/// k - sum_i (H_{2n-i} - H_{k-i}) / (H_{i-1} + H_{2n-i}).
double expected_preserved_pairs(PairScheme scheme, std::size_t n_pairs, std::size_t kept);

/// |Pearson correlation| of each column against the label column. The label
/// itself and constant columns score 0.
ImportanceVector surrogate_importance(const TabularDataset& ds, std::size_t label_col);

/// Ranks columns by descending score, ties broken by column index.
std::vector<std::size_t> importance_order(const ImportanceVector& imp);

/// Two-column CSV (name, score) -> scores aligned with ds column order.
ImportanceVector load_importance_csv(const std::filesystem::path& path, const TabularDataset& ds);

}  // namespace tabwm
