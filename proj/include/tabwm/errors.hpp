#pragma once

#include <stdexcept>
#include <string>

namespace tabwm {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(std::string msg, std::size_t row, std::string column)
        : Error(std::move(msg)), row(row), column(std::move(column)) {}
    std::size_t row;     // 1-based data row (header excluded)
    std::string column;
};

struct EmptyDataset : Error {
    using Error::Error;
};

struct ConstantColumn : Error {
    using Error::Error;
};

struct OutOfRange : Error {
    using Error::Error;
};

struct OddColumnCount : Error {
    using Error::Error;
};

struct AllZeroImportance : Error {
    using Error::Error;
};

struct DegenerateLabel : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct RangeError : Error {
    using Error::Error;
};

struct PlanMismatch : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct NonPositiveRho : Error {
    using Error::Error;
};

}  // namespace tabwm
