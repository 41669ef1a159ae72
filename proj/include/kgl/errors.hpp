#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (alpha not in (0,1), mu <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix dimensions that do not fit together.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A non-finite value produced while evaluating something that must stay finite.
class NumericError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

/// Raised when a memory-free model is handed to an operation that needs N >= 1.
class DegenerateModelError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class SimulationBlowUp : public NumericError {
public:
    SimulationBlowUp(std::size_t step, const std::string& what)
        : NumericError("simulation blew up at step " + std::to_string(step) + ": " + what), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace kgl
