#include "tabwm/synth.hpp"

#include <cmath>

#include "tabwm/rng.hpp"

namespace tabwm {

TabularDataset uniform_dataset(std::size_t m, std::size_t cols, std::uint64_t seed) {
    std::vector<std::pair<std::string, std::vector<double>>> data(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        data[c].first = "c" + std::to_string(c + 1);
        data[c].second.resize(m);
        Stream rng(mix64(seed ^ mix64(c + 1)));
        for (std::size_t r = 0; r < m; ++r) data[c].second[r] = rng.next_u01();
    }
    return TabularDataset::from_columns(std::move(data));
}

TabularDataset gaussian_dataset(std::size_t m, std::size_t cols, std::uint64_t seed, double mean,
                                double sd) {
    std::vector<std::pair<std::string, std::vector<double>>> data(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        data[c].first = "c" + std::to_string(c + 1);
        data[c].second.resize(m);
        Stream rng(mix64(seed ^ mix64(c + 1)));
        for (std::size_t r = 0; r < m; ++r) {
            double u1 = rng.next_u01_open();
            double u2 = rng.next_u01();
            data[c].second[r] = mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                                           std::cos(2.0 * M_PI * u2);
        }
    }
    return TabularDataset::from_columns(std::move(data));
}

}  // namespace tabwm
