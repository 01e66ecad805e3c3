//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace imcsim {

/// Root of every error raised by the model. Callers that only care about
/// "model failed" catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input / configuration problems (CLI exit code 2).
class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& field, const std::string& what)
        : Error("parse error at '" + field + "': " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Model errors (CLI exit code 1).
class ValidationError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class UnsupportedKindError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class TilingRequiredError : public Error {
public:
    TilingRequiredError(std::int64_t rows, std::int64_t cols)
        : Error("weight matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                " exceeds the crossbar; tiling required"),
          rows_(rows), cols_(cols) {}
    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }

private:
    std::int64_t rows_;
    std::int64_t cols_;
};

class UnpackableError : public Error {
public:
    using Error::Error;
};

class SchedulingError : public Error {
public:
    using Error::Error;
};

class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

}  // namespace imcsim
