#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "tabwm/detector.hpp"
#include "tabwm/embedder.hpp"
#include "tabwm/metrics.hpp"
#include "tabwm/rng.hpp"
#include "tabwm/synth.hpp"

using namespace tabwm;

namespace {

PairingPlan single_pair_plan() {
    PairingPlan plan;
    plan.pairs = {{0, 1}};
    return plan;
}

}  // namespace

TEST_CASE("embed_element leaves green values alone") {
    auto g = green_set(123, 100);
    Stream rng(5);
    for (int t = 0; t < 1000; ++t) {
        double x = rng.next_u01();
        double xw = embed_element(x, g, rng.next());
        if (g.is_green(bin_index(x, 100))) {
            CHECK(xw == x);
        } else {
            auto target = nearest_green(x, g).bin;
            CHECK(bin_index(xw, 100) == target);
            CHECK(xw >= (target - 1) / 100.0);
            CHECK(xw < target / 100.0);
        }
    }
}

TEST_CASE("embed_element replacement is uniform within the bin") {
    // Uniformity oracle: mean of 1e5 draws into one bin stays within
    // 3 * width / sqrt(12 * 1e5) of the bin center.
    GreenSet g(100, {37});  // single green bin forces every draw into it
    const int n = 100000;
    double sum = 0.0;
    Stream rng(17);
    for (int t = 0; t < n; ++t) sum += embed_element(0.999, g, rng.next());
    double mean = sum / n;
    double width = 0.01;
    CHECK(std::abs(mean - bin_center(37, 100)) < 3.0 * width / std::sqrt(12.0 * n));
}

TEST_CASE("embed guarantees detection on every cell") {
    auto ds = uniform_dataset(2000, 2, 1);
    WatermarkParams params;
    params.mode = WatermarkMode::unit;
    params.replacement_seed = 9;
    auto [wm, manifest] = embed(ds, single_pair_plan(), params);

    auto [T, m] = count_green(wm, 0, 1, params);
    CHECK(T == m);
    CHECK(m == 2000);
    CHECK(z_score(T, m) == doctest::Approx(std::sqrt(2000.0)));

    // Key column untouched.
    CHECK(wm.columns[0].values == ds.columns[0].values);
}

TEST_CASE("fractional mode keeps integer parts") {
    auto ds = gaussian_dataset(1000, 2, 3, 50.0, 20.0);
    WatermarkParams params;
    params.mode = WatermarkMode::fractional;
    params.replacement_seed = 4;
    auto [wm, manifest] = embed(ds, single_pair_plan(), params);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        CHECK(std::floor(wm.columns[1].values[r]) == std::floor(ds.columns[1].values[r]));
    }
    auto [T, m] = count_green(wm, 0, 1, params);
    CHECK(T == m);
}

TEST_CASE("unit mode range checking") {
    auto ds = TabularDataset::from_columns({{"k", {0.5, 1.2}}, {"v", {0.1, 0.2}}});
    WatermarkParams params;
    params.mode = WatermarkMode::unit;
    params.replacement_seed = 1;
    CHECK_THROWS_AS(embed(ds, single_pair_plan(), params), RangeError);
}

TEST_CASE("embed validates the plan") {
    auto ds = uniform_dataset(10, 4, 2);
    WatermarkParams params;
    params.mode = WatermarkMode::unit;
    params.replacement_seed = 1;
    PairingPlan bad;
    bad.pairs = {{0, 7}};
    CHECK_THROWS_AS(embed(ds, bad, params), PlanMismatch);
    bad.pairs = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(embed(ds, bad, params), PlanMismatch);
}

TEST_CASE("embedding is idempotent and seed-reproducible") {
    auto ds = uniform_dataset(500, 4, 8);
    PairingPlan plan;
    plan.pairs = {{0, 1}, {2, 3}};
    WatermarkParams params;
    params.mode = WatermarkMode::unit;
    params.replacement_seed = 21;

    auto [wm1, m1] = embed(ds, plan, params);
    auto [wm2, m2] = embed(ds, plan, params);
    for (std::size_t c = 0; c < 4; ++c) CHECK(wm1.columns[c].values == wm2.columns[c].values);

    auto [wm_again, m3] = embed(wm1, plan, params);
    for (std::size_t c = 0; c < 4; ++c)
        CHECK(wm_again.columns[c].values == wm1.columns[c].values);
}

TEST_CASE("embedded data stays visually close to the source") {
    auto raw = gaussian_dataset(2000, 2, 12);
    auto ds = normalize_unit(normalize_unit(raw, 0).first, 1).first;
    WatermarkParams params;
    params.bins = 100;
    params.mode = WatermarkMode::unit;
    params.replacement_seed = 5;
    auto [wm, manifest] = embed(ds, single_pair_plan(), params);
    // Per-cell moves are bounded by a few bin widths, so the MSE sits at the
    // (1/b)^2 scale.
    double err = mse(ds, wm, std::vector<std::size_t>{1});
    CHECK(err < 10.0 * 1e-4);
    CHECK(err > 0.0);
}

TEST_CASE("max_distortion_bound evaluates and scales") {
    CHECK(max_distortion_bound(2000, 1, 100, 0.05) ==
          doctest::Approx(0.15287712379549448).epsilon(1e-12));
    CHECK(max_distortion_bound(2000, 1, 200, 0.05) ==
          doctest::Approx(0.5 * max_distortion_bound(2000, 1, 100, 0.05)));
    CHECK(max_distortion_bound(4000, 1, 100, 0.05) > max_distortion_bound(2000, 1, 100, 0.05));
    CHECK(max_distortion_bound(2000, 2, 100, 0.05) > max_distortion_bound(2000, 1, 100, 0.05));
    CHECK_THROWS_AS(max_distortion_bound(10, 1, 100, 0.0), OutOfRange);
}

TEST_CASE("manifest json round trip") {
    auto ds = uniform_dataset(50, 4, 77);
    PairingPlan plan;
    plan.pairs = {{2, 0}, {1, 3}};
    plan.scheme = PairScheme::fi_adjacent;
    plan.rng_seed = 99;
    WatermarkParams params;
    params.bins = 64;
    params.secret = 0xDEADBEEF;
    params.mode = WatermarkMode::unit;
    params.replacement_seed = 6;
    auto [wm, manifest] = embed(ds, plan, params);

    auto dir = std::filesystem::temp_directory_path() / "tabwm_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / "manifest.json";
    save_manifest(manifest, path);
    auto loaded = load_manifest(path);

    CHECK(loaded.bins == 64);
    CHECK(loaded.secret_id == manifest.secret_id);
    CHECK(loaded.mode == WatermarkMode::unit);
    CHECK(loaded.scheme == PairScheme::fi_adjacent);
    CHECK(loaded.pairs == manifest.pairs);
    CHECK(secret_matches(loaded, 0xDEADBEEF));
    CHECK_FALSE(secret_matches(loaded, 0));

    auto back = plan_from_manifest(loaded, ds);
    CHECK(back.pairs == plan.pairs);

    auto other = uniform_dataset(5, 2, 1);
    CHECK_THROWS_AS(plan_from_manifest(loaded, other), PlanMismatch);
}
