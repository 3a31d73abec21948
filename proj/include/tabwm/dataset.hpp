#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabwm/errors.hpp"

namespace tabwm {

/// Affine [lo, hi] <-> [0, 1] transform recorded during normalization.
struct AffineMap {
    double lo = 0.0;
    double hi = 1.0;

    double to_unit(double x) const { return (x - lo) / (hi - lo); }
    double from_unit(double u) const { return lo + u * (hi - lo); }
};

struct Column {
    std::string name;
    std::vector<double> values;
    // Original cell tokens from the source file. Cleared whenever the column
    // is rewritten so the CSV writer re-formats from `values`; kept otherwise
    // so an untouched column round-trips byte-for-byte.
    std::vector<std::string> text;
    std::optional<AffineMap> map;
    int max_decimals = 0;  // most digits observed after '.' in the source
};

/// Non-numeric (or unselected) column carried through for round-trip writes.
struct PassthroughColumn {
    std::string name;
    std::size_t file_pos = 0;
    std::vector<std::string> cells;
};

/// Column-major numeric table. Immutable by convention: transforms return
/// fresh datasets, so concurrent readers never race.
struct TabularDataset {
    std::vector<Column> columns;
    std::vector<std::size_t> file_pos;  // original position per numeric column
    std::vector<PassthroughColumn> passthrough;

    std::size_t rows() const { return columns.empty() ? 0 : columns[0].values.size(); }
    std::size_t cols() const { return columns.size(); }

    std::size_t index_of(const std::string& name) const;

    /// Builds an in-memory dataset from bare columns (no source text).
    static TabularDataset from_columns(std::vector<std::pair<std::string, std::vector<double>>> cols);
};

struct CsvOptions {
    bool header = true;
    std::vector<std::string> select;  // empty = all columns
    // When set, columns that fail to parse as finite reals become passthrough
    // instead of raising ParseError. Used by the CLI's auto column selection.
    bool auto_numeric = false;
};

struct CsvWriteOptions {
    int decimals = -1;  // < 0: up to 12 significant digits
};

TabularDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void write_csv(const TabularDataset& ds, const std::filesystem::path& path,
               const CsvWriteOptions& options = {});
std::string to_csv_string(const TabularDataset& ds, const CsvWriteOptions& options = {});

/// Min-max maps one column into [0, 1] and records the map in its metadata.
/// The returned dataset is a modified copy; the input is untouched.
std::pair<TabularDataset, AffineMap> normalize_unit(const TabularDataset& ds, std::size_t col);

struct SplitReal {
    double int_part;  // floor(x)
    double frac;      // x - floor(x), always in [0, 1)
};

/// Floor-based split; frac lands in [0, 1) for negative x too.
SplitReal split_fractional(double x);

/// Cell formatter shared by the CSV writer: fixed `decimals` places when
/// decimals >= 0, otherwise up to 12 significant digits.
std::string format_cell(double v, int decimals);

}  // namespace tabwm
