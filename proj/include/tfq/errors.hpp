#pragma once

#include <stdexcept>
#include <string>

namespace tfq {

/// Bad shapes, parities, grid mismatches, off-grid shifts.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A matrix failed a structural law (e.g. symplecticity); carries the measured residual.
class ConstraintViolation : public std::domain_error {
public:
    ConstraintViolation(const std::string& what, double residual)
        : std::domain_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Input outside the domain of a closed form (e.g. Re M not positive definite).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// NaN/Inf produced by a user kernel or symbol.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A transform pushed signal energy off the grid; carries the lost energy fraction.
class RangeError : public std::range_error {
public:
    RangeError(const std::string& what, double tail)
        : std::range_error(what), tail_(tail) {}
    double tail_energy() const noexcept { return tail_; }

private:
    double tail_;
};

/// Experiment geometry is inconsistent (overlapping disks, disks off grid).
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedOrder : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace tfq
