#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace pitest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: tuning, family, parameter space, CLI settings.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or non-finite input data.
class DataError : public Error {
public:
    explicit DataError(const std::string& what, long row = -1)
        : Error(what), row_(row) {}
    long row() const noexcept { return row_; }

private:
    long row_;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Iterative method failed; carries the best iterate found so far.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, Vector best = {})
        : Error(what), best_(std::move(best)) {}
    const Vector& best_iterate() const noexcept { return best_; }

private:
    Vector best_;
};

/// Derives an independent 64-bit stream seed from a master seed and a task index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

} // namespace pitest
