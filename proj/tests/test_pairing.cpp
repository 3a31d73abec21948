#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "tabwm/pairing.hpp"
#include "tabwm/rng.hpp"
#include "tabwm/synth.hpp"

using namespace tabwm;

namespace {

// Canonical form of a plan as an unordered matching, for enumeration checks.
std::set<std::pair<std::size_t, std::size_t>> matching_of(const PairingPlan& plan) {
    std::set<std::pair<std::size_t, std::size_t>> m;
    for (auto [a, b] : plan.pairs) m.insert({std::min(a, b), std::max(a, b)});
    return m;
}

void check_perfect_matching(const PairingPlan& plan, std::size_t cols) {
    std::set<std::size_t> seen;
    for (auto [a, b] : plan.pairs) {
        CHECK(a != b);
        CHECK(a < cols);
        CHECK(b < cols);
        CHECK(seen.insert(a).second);
        CHECK(seen.insert(b).second);
    }
    CHECK(seen.size() == cols);
}

}  // namespace

TEST_CASE("pair_uniform basics") {
    auto plan = pair_uniform(2, 7);
    REQUIRE(plan.pairs.size() == 1);
    check_perfect_matching(plan, 2);

    CHECK_THROWS_AS(pair_uniform(5, 7), OddColumnCount);

    // Determinism.
    CHECK(pair_uniform(10, 3).pairs == pair_uniform(10, 3).pairs);
}

TEST_CASE("pair_uniform hits all matchings of 4 columns uniformly") {
    // Enumeration oracle: K4 has exactly 3 perfect matchings.
    std::map<std::set<std::pair<std::size_t, std::size_t>>, int> freq;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        auto plan = pair_uniform(4, mix64(t + 1));
        check_perfect_matching(plan, 4);
        ++freq[matching_of(plan)];
    }
    REQUIRE(freq.size() == 3);
    for (const auto& [m, n] : freq) CHECK(std::abs(n / double(trials) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("pair_probability evaluates the inverse-distance rule") {
    CHECK(pair_probability(1, 2, 4) == doctest::Approx(6.0 / 11.0));

    double total = 0.0;
    for (std::size_t j : {2, 3, 4}) total += pair_probability(1, j, 4);
    CHECK(total == doctest::Approx(1.0));

    CHECK(pair_probability(2, 1, 4) == doctest::Approx(pair_probability(2, 3, 4)));
    CHECK_THROWS_AS(pair_probability(1, 1, 4), IndexError);
}

TEST_CASE("fi_adjacent pairs consecutive ranks") {
    ImportanceVector imp{{0.9, 0.5, 0.7, 0.1}};  // ranks: 0,2,1,3
    auto plan = pair_by_importance(imp, PairScheme::fi_adjacent, 0);
    REQUIRE(plan.pairs.size() == 2);
    CHECK(plan.pairs[0] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(plan.pairs[1] == std::pair<std::size_t, std::size_t>{1, 3});
}

TEST_CASE("pairing is invariant to column relabeling given the same scores") {
    ImportanceVector imp1{{0.9, 0.5, 0.7, 0.1}};
    ImportanceVector imp2{{0.5, 0.9, 0.1, 0.7}};  // same multiset, permuted
    auto p1 = pair_by_importance(imp1, PairScheme::fi_sampled, 11);
    auto p2 = pair_by_importance(imp2, PairScheme::fi_sampled, 11);
    // Map column indices to ranks; the rank-level matchings must agree.
    auto ranks = [](const ImportanceVector& imp, const PairingPlan& plan) {
        auto order = importance_order(imp);
        std::map<std::size_t, std::size_t> rank_of;
        for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r]] = r;
        std::set<std::pair<std::size_t, std::size_t>> m;
        for (auto [a, b] : plan.pairs)
            m.insert({std::min(rank_of[a], rank_of[b]), std::max(rank_of[a], rank_of[b])});
        return m;
    };
    CHECK(ranks(imp1, p1) == ranks(imp2, p2));
}

TEST_CASE("fi_sampled first pick follows pair_probability") {
    ImportanceVector imp{{4.0, 3.0, 2.0, 1.0}};
    const int trials = 10000;
    int first_is_12 = 0;
    for (int t = 0; t < trials; ++t) {
        auto plan = pair_by_importance(imp, PairScheme::fi_sampled, mix64(t + 77));
        check_perfect_matching(plan, 4);
        if (plan.pairs[0] == std::pair<std::size_t, std::size_t>{0, 1}) ++first_is_12;
    }
    double expected = pair_probability(1, 2, 4);  // 6/11
    double se = std::sqrt(expected * (1 - expected) / trials);
    CHECK(std::abs(first_is_12 / double(trials) - expected) < 3 * se + 0.001);
}

TEST_CASE("fi_sampled keys are the higher-importance member") {
    ImportanceVector imp{{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}};
    for (int t = 0; t < 50; ++t) {
        auto plan = pair_by_importance(imp, PairScheme::fi_sampled, mix64(t));
        for (auto [k, v] : plan.pairs) CHECK(imp.scores[k] > imp.scores[v]);
    }
}

TEST_CASE("pair_by_importance error paths") {
    CHECK_THROWS_AS(pair_by_importance(ImportanceVector{{1.0, 2.0, 3.0}},
                                       PairScheme::fi_adjacent, 0),
                    OddColumnCount);
    CHECK_THROWS_AS(pair_by_importance(ImportanceVector{{0.0, 0.0}}, PairScheme::fi_sampled, 0),
                    AllZeroImportance);
}

TEST_CASE("expected_preserved_pairs closed forms") {
    CHECK(expected_preserved_pairs(PairScheme::uniform, 5, 4) == doctest::Approx(2.0 / 3.0));
    CHECK(expected_preserved_pairs(PairScheme::uniform, 25, 1) == 0.0);
    CHECK(expected_preserved_pairs(PairScheme::fi_sampled, 25, 1) == doctest::Approx(0.0));
    // Frozen from independent evaluation of the harmonic expression.
    CHECK(expected_preserved_pairs(PairScheme::fi_sampled, 25, 10) ==
          doctest::Approx(6.166310302212578).epsilon(1e-12));
    CHECK(expected_preserved_pairs(PairScheme::fi_sampled, 25, 20) ==
          doctest::Approx(15.26331059679856).epsilon(1e-12));
    // The closed forms themselves keep the 2x margin for k < n.
    for (std::size_t k : {4, 10, 20, 24}) {
        double fi = expected_preserved_pairs(PairScheme::fi_sampled, 25, k);
        double uni = expected_preserved_pairs(PairScheme::uniform, 25, k);
        CHECK(fi >= 2.0 * uni);
    }
}

TEST_CASE("uniform preserved-pairs Monte Carlo matches the closed form") {
    const std::size_t cols = 20, k = 8;
    const int trials = 4000;
    double mean = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto plan = pair_uniform(cols, mix64(500 + t));
        for (auto [a, b] : plan.pairs)
            if (a < k && b < k) mean += 1.0;
    }
    mean /= trials;
    double expected = expected_preserved_pairs(PairScheme::uniform, cols / 2, k);
    // 3 standard errors of the Monte Carlo mean (variance bounded by k/2).
    double se = std::sqrt((k / 2.0) / trials);
    CHECK(std::abs(mean - expected) < 3 * se);
}

TEST_CASE("surrogate_importance scores correlation strength") {
    auto ds = uniform_dataset(10000, 3, 33);
    // Make column 1 equal to the label column 0; column 2 stays independent.
    ds.columns[1].values = ds.columns[0].values;
    auto imp = surrogate_importance(ds, 0);
    CHECK(imp.scores[0] == 0.0);  // label excluded
    CHECK(imp.scores[1] == doctest::Approx(1.0));
    CHECK(imp.scores[2] < 0.05);
}

TEST_CASE("surrogate_importance is affine-invariant and rejects constant labels") {
    auto ds = uniform_dataset(500, 3, 44);
    auto imp1 = surrogate_importance(ds, 0);
    for (auto& v : ds.columns[2].values) v = 5.0 * v - 3.0;
    auto imp2 = surrogate_importance(ds, 0);
    CHECK(imp1.scores[2] == doctest::Approx(imp2.scores[2]).epsilon(1e-9));

    auto flat = TabularDataset::from_columns({{"y", {1.0, 1.0, 1.0}}, {"x", {1.0, 2.0, 3.0}}});
    CHECK_THROWS_AS(surrogate_importance(flat, 0), DegenerateLabel);
}
