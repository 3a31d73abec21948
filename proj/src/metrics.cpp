#include "tabwm/metrics.hpp"

#include <cmath>

#include "tabwm/embedder.hpp"
#include "tabwm/errors.hpp"

namespace tabwm {
namespace {

void check_shapes(const TabularDataset& x, const TabularDataset& xw) {
    if (x.rows() != xw.rows() || x.cols() != xw.cols())
        throw ShapeMismatch("datasets differ in shape");
}

std::vector<std::size_t> all_cols(const TabularDataset& x) {
    std::vector<std::size_t> cols(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) cols[c] = c;
    return cols;
}

}  // namespace

double linf_distance(const TabularDataset& x, const TabularDataset& xw,
                     const std::optional<std::vector<std::size_t>>& cols) {
    check_shapes(x, xw);
    double worst = 0.0;
    for (std::size_t c : cols ? *cols : all_cols(x)) {
        const auto& a = x.columns[c].values;
        const auto& b = xw.columns[c].values;
        for (std::size_t r = 0; r < a.size(); ++r) worst = std::max(worst, std::abs(a[r] - b[r]));
    }
    return worst;
}

double mse(const TabularDataset& x, const TabularDataset& xw,
           const std::optional<std::vector<std::size_t>>& cols) {
    check_shapes(x, xw);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c : cols ? *cols : all_cols(x)) {
        const auto& a = x.columns[c].values;
        const auto& b = xw.columns[c].values;
        for (std::size_t r = 0; r < a.size(); ++r) {
            double d = a[r] - b[r];
            sum += d * d;
        }
        n += a.size();
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double wasserstein_rowwise(const TabularDataset& x, const TabularDataset& xw, int k) {
    check_shapes(x, xw);
    if (k < 1) throw OutOfRange("order k must be >= 1");
    const std::size_t m = x.rows();
    if (m == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        double norm2 = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
            double d = x.columns[c].values[r] - xw.columns[c].values[r];
            norm2 += d * d;
        }
        acc += std::pow(std::sqrt(norm2), k);
    }
    return std::pow(acc / static_cast<double>(m), 1.0 / k);
}

double wasserstein_bound(std::size_t m, std::size_t n_pairs, std::uint32_t b, double delta) {
    return std::sqrt(2.0 * static_cast<double>(n_pairs)) *
           max_distortion_bound(m, n_pairs, b, delta);
}

FidelityReport fidelity_report(const TabularDataset& x, const TabularDataset& xw,
                               std::size_t n_pairs, std::uint32_t b, double delta, int k,
                               const std::optional<std::vector<std::size_t>>& value_cols) {
    FidelityReport rep;
    rep.linf = linf_distance(x, xw);
    rep.mse = mse(x, xw, value_cols);
    rep.wasserstein_k = wasserstein_rowwise(x, xw, k);
    rep.bound_linf = max_distortion_bound(x.rows(), n_pairs, b, delta);
    rep.bound_wasserstein = wasserstein_bound(x.rows(), n_pairs, b, delta);
    rep.linf_within_bound = rep.linf <= rep.bound_linf;
    rep.wasserstein_within_bound = rep.wasserstein_k <= rep.bound_wasserstein;
    return rep;
}

}  // namespace tabwm
