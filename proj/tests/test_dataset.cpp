#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tabwm/dataset.hpp"
#include "tabwm/rng.hpp"

using namespace tabwm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    auto dir = fs::temp_directory_path() / "tabwm_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_file(const std::string& name, const std::string& content) {
    auto p = temp_file(name);
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("load_csv reads a small file") {
    auto p = write_file("small.csv", "a,b\n0.1,0.9\n0.2,0.8\n0.3,0.7\n");
    auto ds = load_csv(p);
    CHECK(ds.rows() == 3);
    CHECK(ds.cols() == 2);
    CHECK(ds.columns[0].name == "a");
    CHECK(ds.columns[0].values[2] == doctest::Approx(0.3));
    CHECK(ds.columns[1].values[0] == doctest::Approx(0.9));
    CHECK(ds.columns[0].max_decimals == 1);
}

TEST_CASE("load_csv reports the bad cell") {
    auto p = write_file("bad.csv", "a,b\n0.1,0.9\nx,0.8\n");
    try {
        load_csv(p);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row == 2);
        CHECK(e.column == "a");
    }
}

TEST_CASE("load_csv rejects non-finite cells") {
    auto p = write_file("naninf.csv", "a\n1.0\nnan\n");
    CHECK_THROWS_AS(load_csv(p), ParseError);
    auto q = write_file("inf.csv", "a\ninf\n");
    CHECK_THROWS_AS(load_csv(q), ParseError);
}

TEST_CASE("load_csv rejects empty data") {
    auto p = write_file("headeronly.csv", "a,b\n");
    CHECK_THROWS_AS(load_csv(p), EmptyDataset);
}

TEST_CASE("column selection keeps the rest as passthrough") {
    auto p = write_file("select.csv", "a,tag,b\n0.1,x,0.9\n0.2,y,0.8\n");
    auto ds = load_csv(p, {.header = true, .select = {"a", "b"}, .auto_numeric = false});
    CHECK(ds.cols() == 2);
    REQUIRE(ds.passthrough.size() == 1);
    CHECK(ds.passthrough[0].name == "tag");
    // Round trip preserves the untouched file byte-for-byte.
    CHECK(to_csv_string(ds) == "a,tag,b\n0.1,x,0.9\n0.2,y,0.8\n");
}

TEST_CASE("auto_numeric demotes unparseable columns") {
    auto p = write_file("auto.csv", "a,tag\n0.25,hello\n0.75,world\n");
    auto ds = load_csv(p, {.header = true, .select = {}, .auto_numeric = true});
    CHECK(ds.cols() == 1);
    CHECK(ds.passthrough.size() == 1);
}

TEST_CASE("load-write-load round trip is exact on random decimal data") {
    // Oracle: byte comparison of the generated file against its round trip.
    Stream rng(2024);
    std::string csv = "x,y\n";
    for (int r = 0; r < 200; ++r) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f,%.3f\n", rng.next_u01() * 100 - 50,
                      rng.next_u01() * 10);
        csv += buf;
    }
    auto p = write_file("round.csv", csv);
    auto ds = load_csv(p);
    auto out = temp_file("round_out.csv");
    write_csv(ds, out);
    std::ifstream a(p, std::ios::binary), b(out, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);

    auto ds2 = load_csv(out);
    for (std::size_t c = 0; c < ds.cols(); ++c)
        for (std::size_t r = 0; r < ds.rows(); ++r)
            CHECK(ds.columns[c].values[r] == ds2.columns[c].values[r]);
}

TEST_CASE("rfc4180 quoting survives commas and quotes") {
    auto p = write_file("quoted.csv", "\"a,1\",\"say \"\"hi\"\"\"\n1.5,x\n");
    auto ds = load_csv(p, {.header = true, .select = {"a,1"}, .auto_numeric = false});
    CHECK(ds.columns[0].name == "a,1");
    CHECK(ds.passthrough[0].cells[0] == "say \"hi\"");
    auto rt = to_csv_string(ds);
    CHECK(rt == "\"a,1\",\"say \"\"hi\"\"\"\n1.5,x\n");
}

TEST_CASE("normalize_unit maps and records") {
    auto ds = TabularDataset::from_columns({{"v", {0.0, 5.0, 10.0}}});
    auto [norm, map] = normalize_unit(ds, 0);
    CHECK(map.lo == 0.0);
    CHECK(map.hi == 10.0);
    CHECK(norm.columns[0].values == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(norm.columns[0].map.has_value());
    // Input untouched.
    CHECK(ds.columns[0].values[1] == 5.0);
}

TEST_CASE("normalize_unit on already-unit data is near identity") {
    auto ds = TabularDataset::from_columns({{"v", {0.0, 0.25, 1.0}}});
    auto [norm, map] = normalize_unit(ds, 0);
    for (std::size_t r = 0; r < 3; ++r)
        CHECK(norm.columns[0].values[r] == doctest::Approx(ds.columns[0].values[r]).epsilon(1e-12));
}

TEST_CASE("normalize_unit refuses constant columns") {
    auto ds = TabularDataset::from_columns({{"v", {3.0, 3.0, 3.0}}});
    CHECK_THROWS_AS(normalize_unit(ds, 0), ConstantColumn);
}

TEST_CASE("normalize round trip on 1000 random values") {
    Stream rng(7);
    std::vector<double> vals(1000);
    for (auto& v : vals) v = rng.next_u01() * 2000.0 - 1000.0;
    auto ds = TabularDataset::from_columns({{"v", vals}});
    auto [norm, map] = normalize_unit(ds, 0);
    double range = map.hi - map.lo;
    for (std::size_t r = 0; r < vals.size(); ++r) {
        double back = map.from_unit(norm.columns[0].values[r]);
        CHECK(std::abs(back - vals[r]) < 1e-12 * range);
        CHECK(norm.columns[0].values[r] >= 0.0);
        CHECK(norm.columns[0].values[r] <= 1.0);
    }
}

TEST_CASE("split_fractional basics") {
    auto s = split_fractional(3.25);
    CHECK(s.int_part == 3.0);
    CHECK(s.frac == 0.25);

    s = split_fractional(-1.25);
    CHECK(s.int_part == -2.0);
    CHECK(s.frac == 0.75);

    s = split_fractional(0.369);
    CHECK(s.int_part == 0.0);
    CHECK(s.frac == doctest::Approx(0.369));
}

TEST_CASE("split_fractional stays in [0,1) for awkward inputs") {
    for (double x : {-1e-18, -0.0, 1e300, -1e300, 42.0, -42.0, 0.999999999999999,
                     -0.999999999999999}) {
        auto s = split_fractional(x);
        CHECK(s.frac >= 0.0);
        CHECK(s.frac < 1.0);
    }
    Stream rng(99);
    for (int i = 0; i < 10000; ++i) {
        double x = (rng.next_u01() - 0.5) * 1e6;
        auto s = split_fractional(x);
        CHECK(s.frac >= 0.0);
        CHECK(s.frac < 1.0);
        CHECK(s.int_part + s.frac == doctest::Approx(x).epsilon(1e-12));
    }
}
