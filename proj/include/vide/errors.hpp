#pragma once

#include <stdexcept>
#include <string>

namespace vide {

/// Argument outside the mathematical domain of an operation (x < 0, t < 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical decision (tail convergence, Osgood class) could not be made.
class UndecidedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation requires a different Osgood class than the nonlinearity has.
class OsgoodClassError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class AccelerationError : public std::runtime_error {
public:
    enum class Kind { InsufficientCrossings, InsufficientSamples, DivergentAcceleration };

    AccelerationError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Malformed scenario, catalog id or solver configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vide
