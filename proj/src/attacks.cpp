#include "tabwm/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabwm/intervals.hpp"
#include "tabwm/rng.hpp"

namespace tabwm {
namespace {

double box_muller(Stream& rng) {
    double u1 = rng.next_u01_open();
    double u2 = rng.next_u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

double truncate_decimal(double x, int places) {
    if (places < 0) throw OutOfRange("decimal places must be >= 0");
    double scale = std::pow(10.0, places);
    // The snap guard keeps decimal-grid values (whose binary doubles can sit
    // just under the grid line) on their own grid point.
    return std::floor(x * scale + kGridSnap) / scale;
}

TabularDataset truncate_dataset(const TabularDataset& ds, int places) {
    TabularDataset out = ds;
    for (auto& col : out.columns) {
        for (double& v : col.values) v = truncate_decimal(v, places);
        col.text.clear();
    }
    return out;
}

double truncation_escape_prob(std::uint32_t b, int places, std::uint32_t j, double c) {
    if (j < 1 || j > b) throw IndexError("bin index out of range");
    const double grid = std::pow(10.0, places);
    // (b-1)^G / b^G computed in log space to survive large exponents.
    double term1 = std::exp(grid * std::log1p(-1.0 / static_cast<double>(b)));
    double term2 = (c * static_cast<double>(b) - static_cast<double>(j) + 1.0) /
                   static_cast<double>(b);
    return std::clamp(term1 + term2, 0.0, 1.0);
}

double truncation_escape_mc(std::uint32_t b, int places, std::uint32_t j, std::uint64_t seed,
                            std::size_t samples) {
    Stream rng(seed);
    std::size_t escaped = 0;
    const double lo = (static_cast<double>(j) - 1.0) / static_cast<double>(b);
    const double width = 1.0 / static_cast<double>(b);
    for (std::size_t s = 0; s < samples; ++s) {
        double x = lo + rng.next_u01() * width;
        if (bin_index(truncate_decimal(x, places), b) != j) ++escaped;
    }
    return static_cast<double>(escaped) / static_cast<double>(samples);
}

NoiseDist noise_dist_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseDist::gaussian;
    if (s == "uniform") return NoiseDist::uniform;
    throw Error("unknown noise distribution: " + s);
}

TabularDataset add_noise(const TabularDataset& ds, NoiseDist dist, double sigma, double fraction,
                         std::uint64_t seed, bool clamp_unit) {
    if (sigma <= 0.0) throw OutOfRange("sigma must be positive");
    if (fraction < 0.0 || fraction > 1.0) throw OutOfRange("fraction must be in [0,1]");
    TabularDataset out = ds;
    const std::size_t m = ds.rows();
    const auto n_rows = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m)));
    for (std::size_t c = 0; c < out.cols(); ++c) {
        if (n_rows == 0) break;
        std::uint64_t col_seed = mix64(seed ^ mix64(static_cast<std::uint64_t>(c) + 1));
        auto rows = sample_rows(m, n_rows, col_seed);
        Stream rng(mix64(col_seed + kGolden));
        auto& vals = out.columns[c].values;
        for (std::size_t r : rows) {
            double eps = dist == NoiseDist::gaussian ? sigma * box_muller(rng)
                                                     : sigma * (2.0 * rng.next_u01() - 1.0);
            double v = vals[r] + eps;
            if (clamp_unit) v = std::clamp(v, 0.0, 1.0);
            vals[r] = v;
        }
        out.columns[c].text.clear();
    }
    return out;
}

double noise_survival_rho(std::uint32_t b, double sigma) {
    double rho = 0.5 - 1.0 / (4.0 * static_cast<double>(b) * sigma);
    if (rho <= 0.0)
        throw NonPositiveRho("noise too small relative to bin width: rho = " +
                             std::to_string(rho));
    return rho;
}

double expected_attacked_cells(std::size_t rows, double z_th, double rho) {
    if (rho <= 0.0 || rho > 1.0) throw OutOfRange("rho must be in (0,1]");
    return (static_cast<double>(rows) - min_green_count(rows, z_th)) / rho;
}

TabularDataset drop_columns(const TabularDataset& ds, const ImportanceVector& imp,
                            double keep_fraction) {
    if (keep_fraction <= 0.0 || keep_fraction > 1.0)
        throw OutOfRange("keep_fraction must be in (0,1]");
    if (imp.scores.size() != ds.cols()) throw ShapeMismatch("importance length != column count");
    const auto k = static_cast<std::size_t>(
        std::llround(keep_fraction * static_cast<double>(ds.cols())));
    auto order = importance_order(imp);
    std::vector<char> keep(ds.cols(), 0);
    for (std::size_t r = 0; r < std::min(k, order.size()); ++r) keep[order[r]] = 1;

    TabularDataset out;
    out.passthrough = ds.passthrough;
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        if (!keep[c]) continue;
        out.columns.push_back(ds.columns[c]);
        out.file_pos.push_back(c < ds.file_pos.size() ? ds.file_pos[c] : c);
    }
    return out;
}

TabularDataset spoof_fractional(const TabularDataset& S, const TabularDataset& W, double fraction,
                                std::uint64_t seed) {
    if (S.rows() != W.rows() || S.cols() != W.cols())
        throw ShapeMismatch("spoof source and reference differ in shape");
    if (fraction < 0.0 || fraction > 1.0) throw OutOfRange("fraction must be in [0,1]");

    // Pool of reference fractional parts, sorted for nearest-neighbor lookup.
    std::vector<double> pool;
    pool.reserve(W.rows() * W.cols());
    for (const auto& col : W.columns)
        for (double v : col.values) pool.push_back(split_fractional(v).frac);
    std::sort(pool.begin(), pool.end());

    auto nearest = [&pool](double f) {
        auto it = std::lower_bound(pool.begin(), pool.end(), f);
        if (it == pool.begin()) return *it;
        if (it == pool.end()) return *(it - 1);
        double lo = *(it - 1), hi = *it;
        return f - lo <= hi - f ? lo : hi;
    };

    const std::size_t cells = S.rows() * S.cols();
    const auto n_pick =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(cells)));
    auto picked = sample_rows(cells, n_pick, seed);

    TabularDataset out = S;
    for (std::size_t cell : picked) {
        std::size_t c = cell / S.rows();
        std::size_t r = cell % S.rows();
        double x = out.columns[c].values[r];
        double f = nearest(std::abs(x - std::floor(x)));
        out.columns[c].values[r] = x < 0.0 ? std::floor(x) - f : std::floor(x) + f;
    }
    if (n_pick > 0)
        for (auto& col : out.columns) col.text.clear();
    return out;
}

TabularDataset baseline_embed(const TabularDataset& ds, const BaselineParams& params,
                              std::optional<std::uint64_t> replacement_seed) {
    const GreenSet g = green_set(mix64(params.secret), params.bins);
    std::uint64_t seed = replacement_seed ? *replacement_seed : mix64(params.secret + 1);
    TabularDataset out = ds;
    for (std::size_t c = 0; c < out.cols(); ++c) {
        auto& vals = out.columns[c].values;
#pragma omp parallel for schedule(static)
        for (long long r = 0; r < static_cast<long long>(vals.size()); ++r) {
            auto [ip, frac] = split_fractional(vals[r]);
            if (g.is_green(bin_index(frac, params.bins))) continue;
            double fw = embed_element(frac, g, cell_word(seed, c, r));
            std::uint32_t j = nearest_green(frac, g).bin;
            double xw = ip + fw;
            if (bin_index(split_fractional(xw).frac, params.bins) != j)
                xw = ip + bin_center(j, params.bins);
            vals[r] = xw;
        }
        out.columns[c].text.clear();
    }
    return out;
}

DetectionReport baseline_detect(const TabularDataset& ds, const BaselineParams& params,
                                double alpha) {
    const GreenSet g = green_set(mix64(params.secret), params.bins);
    long long green = 0;
    for (const auto& col : ds.columns) {
        const auto& vals = col.values;
#pragma omp parallel for schedule(static) reduction(+ : green)
        for (long long r = 0; r < static_cast<long long>(vals.size()); ++r)
            green += g.is_green(bin_index(split_fractional(vals[r]).frac, params.bins)) ? 1 : 0;
    }
    const std::size_t total = ds.rows() * ds.cols();
    DetectionReport report;
    report.alpha = alpha;
    report.per_test_alpha = alpha;
    PairTestResult r;
    r.green_count = static_cast<std::size_t>(green);
    r.rows_used = total;
    r.z = z_score(r.green_count, total);
    r.p = p_value(r.z);
    report.results.push_back(r);
    report.tests_executed = 1;
    report.queries_spent = 1;
    report.verdict = r.p < alpha ? Verdict::watermarked : Verdict::not_watermarked;
    return report;
}

}  // namespace tabwm
