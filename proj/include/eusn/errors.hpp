#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eusn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hyperparameters violate a documented invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Caller-supplied data is unusable (empty series, bad label, too few items).
class InputError : public Error {
public:
    using Error::Error;
};

/// Eigensolver non-convergence, singular systems and similar.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Malformed dataset or model file. `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Readout training diverged. `epoch()` is 1-based.
class TrainingError : public Error {
public:
    TrainingError(std::size_t epoch, const std::string& what)
        : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

/// Model selection could not produce a configuration.
class SearchError : public Error {
public:
    using Error::Error;
};

}  // namespace eusn
