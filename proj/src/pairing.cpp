#include "tabwm/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabwm/rng.hpp"

namespace tabwm {
namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Stream rng(seed);
    for (std::size_t k = n - 1; k >= 1; --k) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(k + 1));
        std::swap(idx[k], idx[j]);
    }
    return idx;
}

double harmonic(std::size_t i) {
    double h = 0.0;
    for (std::size_t t = 1; t <= i; ++t) h += 1.0 / static_cast<double>(t);
    return h;
}

}  // namespace

std::string to_string(PairScheme s) {
    switch (s) {
        case PairScheme::uniform: return "uniform";
        case PairScheme::fi_adjacent: return "fi_adjacent";
        case PairScheme::fi_sampled: return "fi_sampled";
    }
    return "uniform";
}

PairScheme pair_scheme_from_string(const std::string& s) {
    if (s == "uniform") return PairScheme::uniform;
    if (s == "fi_adjacent") return PairScheme::fi_adjacent;
    if (s == "fi_sampled") return PairScheme::fi_sampled;
    throw Error("unknown pairing scheme: " + s);
}

PairingPlan pair_uniform(std::size_t cols, std::uint64_t rng_seed) {
    if (cols < 2 || cols % 2 != 0)
        throw OddColumnCount("uniform pairing needs an even column count >= 2");
    auto idx = shuffled_indices(cols, rng_seed);
    PairingPlan plan;
    plan.scheme = PairScheme::uniform;
    plan.rng_seed = rng_seed;
    for (std::size_t i = 0; i < cols; i += 2) plan.pairs.emplace_back(idx[i], idx[i + 1]);
    return plan;
}

double pair_probability(std::size_t i, std::size_t j, std::size_t total) {
    if (i == j || i < 1 || j < 1 || i > total || j > total)
        throw IndexError("pair_probability: bad rank indices");
    double denom = 0.0;
    for (std::size_t l = 1; l <= total; ++l)
        if (l != i) denom += 1.0 / std::abs(static_cast<double>(i) - static_cast<double>(l));
    return (1.0 / std::abs(static_cast<double>(i) - static_cast<double>(j))) / denom;
}

std::vector<std::size_t> importance_order(const ImportanceVector& imp) {
    std::vector<std::size_t> order(imp.scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return imp.scores[a] > imp.scores[b];
    });
    return order;
}

PairingPlan pair_by_importance(const ImportanceVector& imp, PairScheme mode,
                               std::uint64_t rng_seed) {
    const std::size_t cols = imp.scores.size();
    if (cols < 2 || cols % 2 != 0)
        throw OddColumnCount("importance pairing needs an even column count >= 2");
    if (std::all_of(imp.scores.begin(), imp.scores.end(), [](double s) { return s <= 0.0; }))
        throw AllZeroImportance("importance vector has no positive score");

    auto order = importance_order(imp);  // order[rank-1] = column index
    PairingPlan plan;
    plan.scheme = mode;
    plan.rng_seed = rng_seed;

    if (mode == PairScheme::fi_adjacent) {
        for (std::size_t r = 0; r < cols; r += 2) plan.pairs.emplace_back(order[r], order[r + 1]);
        return plan;
    }
    if (mode != PairScheme::fi_sampled) throw Error("pair_by_importance: unsupported scheme");

    // Greedy sequential sampling over ranks: the best unmatched rank picks a
    // partner with weight 1/|rank gap|, renormalized over unmatched ranks.
    std::vector<std::size_t> unmatched(cols);  // rank values 1..cols
    std::iota(unmatched.begin(), unmatched.end(), std::size_t{1});
    Stream rng(rng_seed);
    while (!unmatched.empty()) {
        std::size_t i = unmatched.front();
        unmatched.erase(unmatched.begin());
        double total = 0.0;
        for (std::size_t j : unmatched)
            total += 1.0 / std::abs(static_cast<double>(i) - static_cast<double>(j));
        double u = rng.next_u01() * total;
        double acc = 0.0;
        std::size_t pick = unmatched.size() - 1;
        for (std::size_t t = 0; t < unmatched.size(); ++t) {
            acc += 1.0 / std::abs(static_cast<double>(i) - static_cast<double>(unmatched[t]));
            if (u < acc) {
                pick = t;
                break;
            }
        }
        std::size_t j = unmatched[pick];
        unmatched.erase(unmatched.begin() + static_cast<std::ptrdiff_t>(pick));
        // i is the lowest unmatched rank, hence the higher-importance member.
        plan.pairs.emplace_back(order[i - 1], order[j - 1]);
    }
    return plan;
}

double expected_preserved_pairs(PairScheme scheme, std::size_t n_pairs, std::size_t kept) {
    const std::size_t n2 = 2 * n_pairs;
    if (kept < 1 || kept > n2) throw IndexError("kept columns out of range");
    if (scheme == PairScheme::uniform) {
        return static_cast<double>(kept) * static_cast<double>(kept - 1) /
               (2.0 * static_cast<double>(n2 - 1));
    }
    if (scheme != PairScheme::fi_sampled)
        throw Error("expected_preserved_pairs: unsupported scheme");
    double sum = 0.0;
    for (std::size_t i = 1; i <= kept; ++i) {
        double num = harmonic(n2 - i) - harmonic(kept >= i ? kept - i : 0);
        double den = harmonic(i - 1) + harmonic(n2 - i);
        sum += num / den;
    }
    return static_cast<double>(kept) - sum;
}

ImportanceVector surrogate_importance(const TabularDataset& ds, std::size_t label_col) {
    if (label_col >= ds.cols()) throw IndexError("label column out of range");
    const std::size_t m = ds.rows();
    if (m < 3) throw Error("surrogate_importance needs at least 3 rows");
    const auto& y = ds.columns[label_col].values;
    double ymean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
    double yvar = 0.0;
    for (double v : y) yvar += (v - ymean) * (v - ymean);
    if (yvar == 0.0) throw DegenerateLabel("label column is constant");

    ImportanceVector imp;
    imp.scores.assign(ds.cols(), 0.0);
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        if (c == label_col) continue;
        const auto& x = ds.columns[c].values;
        double xmean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m);
        double xvar = 0.0, cov = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            xvar += (x[r] - xmean) * (x[r] - xmean);
            cov += (x[r] - xmean) * (y[r] - ymean);
        }
        if (xvar == 0.0) continue;  // constant feature scores 0
        imp.scores[c] = std::abs(cov / std::sqrt(xvar * yvar));
    }
    return imp;
}

ImportanceVector load_importance_csv(const std::filesystem::path& path,
                                     const TabularDataset& ds) {
    auto table = load_csv(path, CsvOptions{.header = true, .select = {}, .auto_numeric = true});
    if (table.passthrough.size() != 1 || table.columns.size() != 1)
        throw Error("importance file must have exactly one name and one score column");
    const auto& names = table.passthrough[0].cells;
    const auto& scores = table.columns[0].values;
    ImportanceVector imp;
    imp.scores.assign(ds.cols(), 0.0);
    for (std::size_t r = 0; r < names.size(); ++r)
        imp.scores[ds.index_of(names[r])] = scores[r];
    return imp;
}

}  // namespace tabwm
