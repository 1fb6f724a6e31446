#pragma once

#include <stdexcept>
#include <string>

namespace elliptail {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model parameters or a model that violates survival-function axioms.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Bad argument to an operation (out-of-range correlation, negative threshold, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature failed to meet its tolerance within the evaluation budget.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double partial_value, double partial_error)
        : Error(what), partial_value_(partial_value), partial_error_(partial_error) {}

    double partial_value() const noexcept { return partial_value_; }
    double partial_error() const noexcept { return partial_error_; }

private:
    double partial_value_;
    double partial_error_;
};

/// A query point lies outside the validity region of an asymptotic expansion.
/// `suggested()` names the regime that does cover the point, when one exists.
class RegimeError : public Error {
public:
    RegimeError(const std::string& what, std::string suggested)
        : Error(what), suggested_(std::move(suggested)) {}

    const std::string& suggested() const noexcept { return suggested_; }

private:
    std::string suggested_;
};

/// File or stream input/output failed, or an input file is malformed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Estimation could not proceed (degenerate sample, failed fit).
class EstimationError : public Error {
public:
    using Error::Error;
};

}  // namespace elliptail
