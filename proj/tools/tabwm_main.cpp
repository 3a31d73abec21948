// Command-line front end: embed / detect / attack / spoof / metrics / bench /
// pair over CSV files and JSON manifests.
//
// Exit codes: 0 success (detect: watermarked), 1 not watermarked,
//             2 usage or data error, 3 query budget exhausted.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "tabwm/attacks.hpp"
#include "tabwm/bench.hpp"
#include "tabwm/dataset.hpp"
#include "tabwm/detector.hpp"
#include "tabwm/embedder.hpp"
#include "tabwm/metrics.hpp"
#include "tabwm/pairing.hpp"
#include "tabwm/rng.hpp"

namespace {

constexpr const char* kVersion = "tabwm 1.0.0";

std::uint64_t parse_secret(const std::string& hex_flag) {
    std::string hex = hex_flag;
    if (hex.empty())
        if (const char* env = std::getenv("WM_SECRET_HEX")) hex = env;
    if (hex.empty()) return 0;
    return std::stoull(hex, nullptr, 16);
}

// Columns eligible for watermarking by default: numeric with at least
// ceil(log10(b)) observed decimal digits, i.e. data the bin grid can perturb
// without changing its apparent precision.
std::vector<std::size_t> eligible_columns(const tabwm::TabularDataset& ds, std::uint32_t bins) {
    int needed = 0;
    for (std::uint32_t s = 1; s < bins; s *= 10) ++needed;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < ds.cols(); ++c)
        if (ds.columns[c].max_decimals >= needed || ds.columns[c].text.empty())
            cols.push_back(c);
    return cols;
}

tabwm::ImportanceVector importance_for(const tabwm::TabularDataset& ds,
                                       const std::string& importance_file,
                                       const std::string& label) {
    if (!importance_file.empty()) return tabwm::load_importance_csv(importance_file, ds);
    if (!label.empty()) return tabwm::surrogate_importance(ds, ds.index_of(label));
    throw tabwm::Error("this pairing scheme needs --importance-file or --label");
}

nlohmann::json affine_json(const tabwm::TabularDataset& ds) {
    auto j = nlohmann::json::object();
    for (const auto& c : ds.columns)
        if (c.map) j[c.name] = {{"lo", c.map->lo}, {"hi", c.map->hi}};
    return j;
}

struct CommonFlags {
    std::uint32_t bins = 100;
    std::string mode = "fractional";
    std::string secret_hex;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool json = false;
};

void apply_threads(int threads) {
    if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise key/value interval watermark for numeric tabular data"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- embed ----------------------------------------------------------
    auto* embed_cmd = app.add_subcommand("embed", "Watermark a CSV dataset");
    std::string embed_in, embed_out, embed_manifest, embed_pairing = "fi_adjacent";
    std::string embed_importance, embed_label, embed_columns;
    int embed_decimals = -1;
    CommonFlags ef;
    embed_cmd->add_option("input", embed_in, "input CSV")->required();
    embed_cmd->add_option("--out", embed_out, "watermarked CSV path")->required();
    embed_cmd->add_option("--manifest", embed_manifest, "manifest JSON path")->required();
    embed_cmd->add_option("--bins", ef.bins, "bin count b");
    embed_cmd->add_option("--mode", ef.mode, "unit | fractional");
    embed_cmd->add_option("--secret-hex", ef.secret_hex, "secret key (hex), or WM_SECRET_HEX");
    embed_cmd->add_option("--pairing", embed_pairing, "uniform | fi_adjacent | fi_sampled");
    embed_cmd->add_option("--importance-file", embed_importance, "CSV of (name,score)");
    embed_cmd->add_option("--label", embed_label, "label column for surrogate importance");
    embed_cmd->add_option("--columns", embed_columns, "comma-separated columns to watermark");
    embed_cmd->add_option("--seed", ef.seed, "pairing + replacement seed")
        ->each([&](const std::string&) { ef.seed_set = true; });
    embed_cmd->add_option("--decimals", embed_decimals, "fixed output decimal places");
    embed_cmd->add_option("--threads", ef.threads, "worker threads (default: cores)");
    embed_cmd->add_flag("--json", ef.json, "machine-readable stdout");

    // ---- detect ---------------------------------------------------------
    auto* detect_cmd = app.add_subcommand("detect", "Test a CSV for the watermark");
    std::string det_in, det_manifest, det_out, det_order = "index", det_importance, det_label;
    std::string det_divisor = "nsq";
    double det_alpha = 0.05, det_zstop = 4.0;
    std::size_t det_rows = 24, det_budget = 0;
    bool det_blind = false;
    CommonFlags df;
    detect_cmd->add_option("input", det_in, "input CSV")->required();
    detect_cmd->add_option("--manifest", det_manifest, "owner manifest JSON");
    detect_cmd->add_flag("--blind", det_blind, "search pairs without a manifest");
    detect_cmd->add_option("--alpha", det_alpha, "significance level");
    detect_cmd->add_option("--divisor", det_divisor, "per-test alpha divisor: nsq | tests");
    detect_cmd->add_option("--z-stop", det_zstop, "blind early-stop z threshold");
    detect_cmd->add_option("--sample-rows", det_rows, "blind per-candidate row sample");
    detect_cmd->add_option("--query-budget", det_budget, "abort after this many candidate tests");
    detect_cmd->add_option("--order", det_order, "blind candidate order: importance | index");
    detect_cmd->add_option("--importance-file", det_importance, "CSV of (name,score)");
    detect_cmd->add_option("--label", det_label, "label column for surrogate importance");
    detect_cmd->add_option("--bins", df.bins, "bin count b (blind)");
    detect_cmd->add_option("--mode", df.mode, "unit | fractional (blind)");
    detect_cmd->add_option("--secret-hex", df.secret_hex, "secret key (hex)");
    detect_cmd->add_option("--seed", df.seed, "row sample seed");
    detect_cmd->add_option("--out", det_out, "write the detection report JSON here");
    detect_cmd->add_option("--threads", df.threads, "worker threads");
    detect_cmd->add_flag("--json", df.json, "machine-readable stdout");

    // ---- attack ---------------------------------------------------------
    auto* attack_cmd = app.add_subcommand("attack", "Apply a preprocessing attack");
    std::string atk_in, atk_out, atk_kind, atk_dist = "gaussian", atk_record;
    std::string atk_importance, atk_label;
    int atk_p = 2;
    double atk_sigma = 0.01, atk_fraction = 1.0, atk_keep = 1.0;
    std::uint64_t atk_seed = 0;
    bool atk_clamp = false;
    int atk_decimals = -1;
    attack_cmd->add_option("input", atk_in, "input CSV")->required();
    attack_cmd->add_option("--kind", atk_kind, "truncate | noise | drop_columns")->required();
    attack_cmd->add_option("--out", atk_out, "attacked CSV path")->required();
    attack_cmd->add_option("--p", atk_p, "decimal places kept by truncation");
    attack_cmd->add_option("--sigma", atk_sigma, "noise scale");
    attack_cmd->add_option("--dist", atk_dist, "gaussian | uniform");
    attack_cmd->add_option("--fraction", atk_fraction, "fraction of rows perturbed");
    attack_cmd->add_option("--keep-fraction", atk_keep, "fraction of columns kept");
    attack_cmd->add_option("--importance-file", atk_importance, "CSV of (name,score)");
    attack_cmd->add_option("--label", atk_label, "label column for surrogate importance");
    attack_cmd->add_option("--seed", atk_seed, "attack seed");
    attack_cmd->add_flag("--clamp-unit", atk_clamp, "clamp noised values to [0,1]");
    attack_cmd->add_option("--record", atk_record, "write a JSON attack record here");
    attack_cmd->add_option("--decimals", atk_decimals, "fixed output decimal places");

    // ---- spoof ----------------------------------------------------------
    auto* spoof_cmd = app.add_subcommand("spoof", "Fractional-replacement forgery");
    std::string sp_source, sp_reference, sp_out, sp_record;
    double sp_fraction = 1.0;
    std::uint64_t sp_seed = 0;
    spoof_cmd->add_option("source", sp_source, "dataset to forge onto")->required();
    spoof_cmd->add_option("reference", sp_reference, "watermarked reference CSV")->required();
    spoof_cmd->add_option("--out", sp_out, "forged CSV path")->required();
    spoof_cmd->add_option("--fraction", sp_fraction, "fraction of cells processed");
    spoof_cmd->add_option("--seed", sp_seed, "cell-selection seed");
    spoof_cmd->add_option("--record", sp_record, "write a JSON record here");

    // ---- metrics --------------------------------------------------------
    auto* metrics_cmd = app.add_subcommand("metrics", "Fidelity metrics between two CSVs");
    std::string mt_a, mt_b, mt_manifest;
    int mt_k = 1;
    double mt_delta = 0.05;
    metrics_cmd->add_option("original", mt_a, "original CSV")->required();
    metrics_cmd->add_option("modified", mt_b, "modified CSV")->required();
    metrics_cmd->add_option("--manifest", mt_manifest, "scope MSE to the manifest value columns");
    metrics_cmd->add_option("--k", mt_k, "row-coupled distance order");
    metrics_cmd->add_option("--delta", mt_delta, "bound confidence parameter");

    // ---- bench ----------------------------------------------------------
    auto* bench_cmd = app.add_subcommand("bench", "Synthetic experiment harness");
    tabwm::bench::BenchSpec bench_spec;
    bench_cmd->add_option("--name", bench_spec.name,
                          "fidelity_sweep | z_vs_rows | noise_sweep | "
                          "pairing_preservation | spoof_curve")
        ->required();
    bench_cmd->add_option("--trials", bench_spec.trials, "trials per grid point");
    bench_cmd->add_option("--seed", bench_spec.seed, "base seed");
    bench_cmd->add_option("--out", bench_spec.out_dir, "output directory");

    // ---- pair -----------------------------------------------------------
    auto* pair_cmd = app.add_subcommand("pair", "Compute a pairing plan");
    std::string pr_in, pr_scheme = "fi_adjacent", pr_importance, pr_label, pr_out;
    std::uint64_t pr_seed = 0;
    pair_cmd->add_option("input", pr_in, "input CSV")->required();
    pair_cmd->add_option("--scheme", pr_scheme, "uniform | fi_adjacent | fi_sampled");
    pair_cmd->add_option("--importance-file", pr_importance, "CSV of (name,score)");
    pair_cmd->add_option("--label", pr_label, "label column for surrogate importance");
    pair_cmd->add_option("--seed", pr_seed, "pairing seed");
    pair_cmd->add_option("--out", pr_out, "write the plan JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*embed_cmd) {
            apply_threads(ef.threads);
            auto ds = tabwm::load_csv(embed_in, {.header = true, .select = {}, .auto_numeric = true});
            tabwm::WatermarkParams params;
            params.bins = ef.bins;
            params.secret = parse_secret(ef.secret_hex);
            params.mode = tabwm::watermark_mode_from_string(ef.mode);
            params.replacement_seed = tabwm::mix64(ef.seed ^ 0xEE9D4A2C6B1F035Dull);

            std::vector<std::size_t> cols;
            if (!embed_columns.empty()) {
                std::stringstream ss(embed_columns);
                std::string name;
                while (std::getline(ss, name, ',')) cols.push_back(ds.index_of(name));
            } else {
                cols = eligible_columns(ds, params.bins);
            }
            if (cols.size() < 2) throw tabwm::Error("need at least 2 eligible columns");
            if (cols.size() % 2 != 0) cols.pop_back();  // pairing needs an even count

            // Pair within the eligible subset, then translate to dataset indices.
            auto scheme = tabwm::pair_scheme_from_string(embed_pairing);
            tabwm::PairingPlan sub_plan;
            if (scheme == tabwm::PairScheme::uniform) {
                sub_plan = tabwm::pair_uniform(cols.size(), tabwm::mix64(ef.seed + 1));
            } else {
                auto imp_full = importance_for(ds, embed_importance, embed_label);
                tabwm::ImportanceVector imp_sub;
                for (std::size_t c : cols) imp_sub.scores.push_back(imp_full.scores[c]);
                sub_plan = tabwm::pair_by_importance(imp_sub, scheme, tabwm::mix64(ef.seed + 1));
            }
            tabwm::PairingPlan plan;
            plan.scheme = sub_plan.scheme;
            plan.rng_seed = sub_plan.rng_seed;
            for (auto [k, v] : sub_plan.pairs) plan.pairs.emplace_back(cols[k], cols[v]);

            auto [wm, manifest] = tabwm::embed(ds, plan, params);
            tabwm::write_csv(wm, embed_out, {.decimals = embed_decimals});
            tabwm::save_manifest(manifest, embed_manifest);
            if (ef.json) {
                nlohmann::json j{{"output", embed_out},
                                 {"manifest", embed_manifest},
                                 {"pairs", manifest.pairs.size()},
                                 {"bins", params.bins},
                                 {"mode", tabwm::to_string(params.mode)}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "embedded " << manifest.pairs.size() << " pairs into " << embed_out
                          << "\n";
            }
            return 0;
        }

        if (*detect_cmd) {
            apply_threads(df.threads);
            auto ds = tabwm::load_csv(det_in, {.header = true, .select = {}, .auto_numeric = true});
            tabwm::DetectionReport report;
            if (det_blind) {
                tabwm::WatermarkParams params;
                params.bins = df.bins;
                params.secret = parse_secret(df.secret_hex);
                params.mode = tabwm::watermark_mode_from_string(df.mode);
                tabwm::BlindOptions opt;
                opt.alpha = det_alpha;
                opt.z_stop = det_zstop;
                opt.sample = {det_rows, df.seed};
                opt.divisor = det_divisor == "tests" ? tabwm::BonferroniDivisor::tests_executed
                                                     : tabwm::BonferroniDivisor::pairs_squared;
                if (det_order == "importance") {
                    opt.order = tabwm::CandidateOrder::importance;
                    opt.importance = importance_for(ds, det_importance, det_label);
                }
                tabwm::QueryBudget budget{det_budget, 0};
                try {
                    report = tabwm::detect_blind(ds, params, opt,
                                                 det_budget > 0 ? &budget : nullptr);
                } catch (const tabwm::BudgetExhausted& e) {
                    if (!det_out.empty()) tabwm::save_report(e.report, det_out);
                    std::cerr << e.what() << "\n";
                    return 3;
                }
            } else {
                if (det_manifest.empty())
                    throw tabwm::Error("detect needs --manifest or --blind");
                auto manifest = tabwm::load_manifest(det_manifest);
                auto divisor = det_divisor == "tests" ? tabwm::BonferroniDivisor::tests_executed
                                                      : tabwm::BonferroniDivisor::pairs_squared;
                report = tabwm::detect_with_manifest(ds, manifest, parse_secret(df.secret_hex),
                                                     det_alpha, divisor);
            }
            if (!det_out.empty()) tabwm::save_report(report, det_out);
            if (df.json)
                std::cout << tabwm::report_to_json(report);
            else
                std::cout << (report.verdict == tabwm::Verdict::watermarked ? "watermarked"
                                                                            : "not watermarked")
                          << " (" << report.tests_executed << " tests)\n";
            return report.verdict == tabwm::Verdict::watermarked ? 0 : 1;
        }

        if (*attack_cmd) {
            auto ds = tabwm::load_csv(atk_in, {.header = true, .select = {}, .auto_numeric = true});
            tabwm::TabularDataset out;
            nlohmann::json record{{"kind", atk_kind}, {"input", atk_in}, {"output", atk_out}};
            if (atk_kind == "truncate") {
                out = tabwm::truncate_dataset(ds, atk_p);
                record["p"] = atk_p;
            } else if (atk_kind == "noise") {
                out = tabwm::add_noise(ds, tabwm::noise_dist_from_string(atk_dist), atk_sigma,
                                       atk_fraction, atk_seed, atk_clamp);
                record["dist"] = atk_dist;
                record["sigma"] = atk_sigma;
                record["fraction"] = atk_fraction;
                record["seed"] = atk_seed;
            } else if (atk_kind == "drop_columns") {
                auto imp = importance_for(ds, atk_importance, atk_label);
                out = tabwm::drop_columns(ds, imp, atk_keep);
                record["keep_fraction"] = atk_keep;
            } else {
                throw tabwm::Error("unknown attack kind: " + atk_kind);
            }
            tabwm::write_csv(out, atk_out, {.decimals = atk_decimals});
            if (!atk_record.empty()) {
                std::ofstream rec(atk_record, std::ios::binary);
                rec << record.dump(2) << "\n";
            }
            return 0;
        }

        if (*spoof_cmd) {
            auto source = tabwm::load_csv(sp_source, {.header = true, .select = {}, .auto_numeric = true});
            auto reference =
                tabwm::load_csv(sp_reference, {.header = true, .select = {}, .auto_numeric = true});
            auto out = tabwm::spoof_fractional(source, reference, sp_fraction, sp_seed);
            tabwm::write_csv(out, sp_out, {});
            if (!sp_record.empty()) {
                nlohmann::json record{{"kind", "spoof"},
                                      {"source", sp_source},
                                      {"reference", sp_reference},
                                      {"output", sp_out},
                                      {"fraction", sp_fraction},
                                      {"seed", sp_seed}};
                std::ofstream rec(sp_record, std::ios::binary);
                rec << record.dump(2) << "\n";
            }
            return 0;
        }

        if (*metrics_cmd) {
            auto a = tabwm::load_csv(mt_a, {.header = true, .select = {}, .auto_numeric = true});
            auto b = tabwm::load_csv(mt_b, {.header = true, .select = {}, .auto_numeric = true});
            std::optional<std::vector<std::size_t>> value_cols;
            std::size_t n_pairs = std::max<std::size_t>(a.cols() / 2, 1);
            std::uint32_t bins = 100;
            if (!mt_manifest.empty()) {
                auto manifest = tabwm::load_manifest(mt_manifest);
                auto plan = tabwm::plan_from_manifest(manifest, a);
                value_cols.emplace();
                for (auto [k, v] : plan.pairs) value_cols->push_back(v);
                n_pairs = plan.n_pairs();
                bins = manifest.bins;
            }
            auto rep = tabwm::fidelity_report(a, b, n_pairs, bins, mt_delta, mt_k, value_cols);
            nlohmann::json j{{"linf", rep.linf},
                             {"mse", rep.mse},
                             {"wasserstein_k", rep.wasserstein_k},
                             {"bound_linf", rep.bound_linf},
                             {"bound_wasserstein", rep.bound_wasserstein},
                             {"linf_within_bound", rep.linf_within_bound},
                             {"wasserstein_within_bound", rep.wasserstein_within_bound},
                             {"k", mt_k},
                             {"delta", mt_delta},
                             {"affine_maps", affine_json(a)}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*bench_cmd) {
            tabwm::bench::run_bench(bench_spec);
            std::cout << "bench " << bench_spec.name << " written to "
                      << (bench_spec.out_dir / bench_spec.name).string() << "\n";
            return 0;
        }

        if (*pair_cmd) {
            auto ds = tabwm::load_csv(pr_in, {.header = true, .select = {}, .auto_numeric = true});
            auto scheme = tabwm::pair_scheme_from_string(pr_scheme);
            tabwm::PairingPlan plan;
            if (scheme == tabwm::PairScheme::uniform)
                plan = tabwm::pair_uniform(ds.cols(), pr_seed);
            else
                plan = tabwm::pair_by_importance(importance_for(ds, pr_importance, pr_label),
                                                 scheme, pr_seed);
            nlohmann::json j;
            j["scheme"] = tabwm::to_string(plan.scheme);
            j["rng_seed"] = plan.rng_seed;
            auto pairs = nlohmann::json::array();
            for (auto [k, v] : plan.pairs)
                pairs.push_back({ds.columns[k].name, ds.columns[v].name});
            j["pairs"] = pairs;
            std::string text = j.dump(2) + "\n";
            if (!pr_out.empty()) {
                std::ofstream out(pr_out, std::ios::binary);
                out << text;
            } else {
                std::cout << text;
            }
            return 0;
        }
    } catch (const tabwm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
