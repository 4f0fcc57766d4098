#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dampnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative z, a > b, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// G̃⁻¹ was asked for a value outside the range of G̃.
class RangeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A velocity function is not bounded away from zero, so its antiderivative
/// cannot be inverted.
class NonInvertibleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Structural violations of the tree network, reported all at once.
struct Violation {
    std::string code;
    std::string message;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    ValidationError(const std::string& what, std::vector<Violation> violations)
        : Error(what), violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Config file does not match the schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// The backward damping ODE blows up before reaching the injection point: no
/// finite inflow delivers the requested outflow.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::string arc_id, double damping_mass)
        : Error(what), arc_id_(std::move(arc_id)), damping_mass_(damping_mass) {}

    const std::string& arc_id() const noexcept { return arc_id_; }
    double damping_mass() const noexcept { return damping_mass_; }

private:
    std::string arc_id_;
    double damping_mass_;
};

/// A scenario or output file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Discretization broke one of its invariants (negative cell value, grid
/// misalignment, missing coupling data).
class NumericsError : public Error {
public:
    using Error::Error;
};

}  // namespace dampnet
