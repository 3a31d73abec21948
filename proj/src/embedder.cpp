#include "tabwm/embedder.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>

#include <json.hpp>

namespace tabwm {
namespace {

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso8601_now() {
    std::time_t t;
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"))
        t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
    else
        t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Scaled coordinate of x in [0,1] for mode-aware binning.
double unit_coordinate(double x, WatermarkMode mode) {
    return mode == WatermarkMode::unit ? x : split_fractional(x).frac;
}

}  // namespace

std::string to_string(WatermarkMode m) {
    return m == WatermarkMode::unit ? "unit" : "fractional";
}

WatermarkMode watermark_mode_from_string(const std::string& s) {
    if (s == "unit") return WatermarkMode::unit;
    if (s == "fractional") return WatermarkMode::fractional;
    throw Error("unknown watermark mode: " + s);
}

std::uint64_t cell_word(std::uint64_t replacement_seed, std::size_t pair_idx, std::size_t row) {
    std::uint64_t pair_seed = mix64(replacement_seed ^ mix64(static_cast<std::uint64_t>(pair_idx) + 1));
    return stream_word(pair_seed, static_cast<std::uint64_t>(row) + 1);
}

double embed_element(double x, const GreenSet& g, std::uint64_t word) {
    const std::uint32_t b = g.bins();
    auto [j, already_green] = nearest_green(x, g);
    if (already_green) return x;
    double u = kEdgeMargin + u01(word) * (1.0 - 2.0 * kEdgeMargin);
    double xw = (static_cast<double>(j) - 1.0 + u) / static_cast<double>(b);
    if (bin_index(xw, b) != j) xw = bin_center(j, b);  // rounding fallback
    return xw;
}

std::pair<TabularDataset, WatermarkManifest> embed(const TabularDataset& ds,
                                                   const PairingPlan& plan,
                                                   const WatermarkParams& params) {
    const std::size_t m = ds.rows();
    if (m == 0) throw EmptyDataset("cannot embed into an empty dataset");

    std::vector<char> used(ds.cols(), 0);
    for (const auto& [k, v] : plan.pairs) {
        if (k >= ds.cols() || v >= ds.cols() || k == v)
            throw PlanMismatch("pairing plan references bad column indices");
        if (used[k]++ || used[v]++) throw PlanMismatch("pairing plan reuses a column");
    }

    // Validate ranges up front; the parallel loop below must not throw.
    if (params.mode == WatermarkMode::unit) {
        for (const auto& [k, v] : plan.pairs) {
            for (std::size_t c : {k, v}) {
                for (double x : ds.columns[c].values) {
                    if (x < -kEdgeTol || x > 1.0 + kEdgeTol)
                        throw RangeError("unit mode requires values in [0,1]; column \"" +
                                         ds.columns[c].name + "\" has " + std::to_string(x));
                }
            }
        }
    }

    std::uint64_t replacement_seed =
        params.replacement_seed ? *params.replacement_seed : std::random_device{}();

    TabularDataset out = ds;
    const IntervalParams iparams{params.bins, params.secret};

    for (std::size_t p = 0; p < plan.pairs.size(); ++p) {
        const auto [key_col, value_col] = plan.pairs[p];
        const auto& key = ds.columns[key_col].values;
        const auto& val = ds.columns[value_col].values;
        auto& val_out = out.columns[value_col].values;

        std::vector<std::uint32_t> key_bins(m);
        for (std::size_t r = 0; r < m; ++r)
            key_bins[r] = bin_index(unit_coordinate(key[r], params.mode), params.bins);
        const GreenTable table(iparams, key_bins);

#pragma omp parallel for schedule(static)
        for (long long r = 0; r < static_cast<long long>(m); ++r) {
            const GreenSet& g = table.at(key_bins[r]);
            const double x = val[r];
            if (params.mode == WatermarkMode::unit) {
                val_out[r] = embed_element(x, g, cell_word(replacement_seed, p, r));
            } else {
                auto [ip, frac] = split_fractional(x);
                std::uint32_t j = nearest_green(frac, g).bin;
                if (g.is_green(bin_index(frac, params.bins))) continue;
                double fw = embed_element(frac, g, cell_word(replacement_seed, p, r));
                double xw = ip + fw;
                // Reassembly can round the fraction across a bin edge; verify
                // through the same path detection uses and recenter if so.
                if (bin_index(split_fractional(xw).frac, params.bins) != j) {
                    xw = ip + bin_center(j, params.bins);
                    if (bin_index(split_fractional(xw).frac, params.bins) != j)
                        xw = x;  // magnitude too large for any fractional edit
                }
                val_out[r] = xw;
            }
        }
        out.columns[value_col].text.clear();
    }

    WatermarkManifest manifest;
    manifest.bins = params.bins;
    manifest.secret_id = hex64(mix64(params.secret));
    manifest.mode = params.mode;
    manifest.scheme = plan.scheme;
    manifest.rng_seed = plan.rng_seed;
    for (const auto& [k, v] : plan.pairs)
        manifest.pairs.emplace_back(ds.columns[k].name, ds.columns[v].name);
    for (const auto& col : ds.columns)
        if (col.map) manifest.column_maps[col.name] = *col.map;
    manifest.created = iso8601_now();
    return {std::move(out), std::move(manifest)};
}

double max_distortion_bound(std::size_t m, std::size_t n_pairs, std::uint32_t b, double delta) {
    if (delta <= 0.0 || delta >= 1.0) throw OutOfRange("delta must be in (0,1)");
    return std::log2(static_cast<double>(m) * static_cast<double>(n_pairs) / delta) /
           static_cast<double>(b);
}

std::string manifest_to_json(const WatermarkManifest& manifest) {
    nlohmann::json j;
    j["version"] = manifest.version;
    j["b"] = manifest.bins;
    j["secret_id"] = manifest.secret_id;
    j["mode"] = to_string(manifest.mode);
    j["scheme"] = to_string(manifest.scheme);
    j["rng_seed"] = manifest.rng_seed;
    auto pairs = nlohmann::json::array();
    for (const auto& [k, v] : manifest.pairs) pairs.push_back({k, v});
    j["pairs"] = pairs;
    auto maps = nlohmann::json::object();
    for (const auto& [name, map] : manifest.column_maps)
        maps[name] = {{"lo", map.lo}, {"hi", map.hi}};
    j["column_maps"] = maps;
    j["created"] = manifest.created;
    return j.dump(2) + "\n";
}

void save_manifest(const WatermarkManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << manifest_to_json(manifest);
}

WatermarkManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open manifest: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    WatermarkManifest manifest;
    manifest.version = j.at("version").get<int>();
    manifest.bins = j.at("b").get<std::uint32_t>();
    manifest.secret_id = j.at("secret_id").get<std::string>();
    manifest.mode = watermark_mode_from_string(j.at("mode").get<std::string>());
    manifest.scheme = pair_scheme_from_string(j.at("scheme").get<std::string>());
    manifest.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& p : j.at("pairs"))
        manifest.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    for (auto it = j.at("column_maps").begin(); it != j.at("column_maps").end(); ++it)
        manifest.column_maps[it.key()] = AffineMap{it.value().at("lo").get<double>(),
                                                   it.value().at("hi").get<double>()};
    manifest.created = j.at("created").get<std::string>();
    return manifest;
}

PairingPlan plan_from_manifest(const WatermarkManifest& manifest, const TabularDataset& ds) {
    PairingPlan plan;
    plan.scheme = manifest.scheme;
    plan.rng_seed = manifest.rng_seed;
    for (const auto& [kname, vname] : manifest.pairs) {
        try {
            plan.pairs.emplace_back(ds.index_of(kname), ds.index_of(vname));
        } catch (const IndexError& e) {
            throw PlanMismatch(std::string("manifest column missing from dataset: ") + e.what());
        }
    }
    return plan;
}

bool secret_matches(const WatermarkManifest& manifest, std::uint64_t secret) {
    return manifest.secret_id == hex64(mix64(secret));
}

}  // namespace tabwm
