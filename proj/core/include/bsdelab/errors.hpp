#pragma once

#include <stdexcept>
#include <string>

namespace bsdelab {

/// Resource limits exceeded (tree depth, grid size).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical precondition was violated (positivity of the density,
/// scheme stability, CFL). Carries advice on how to fix the setup.
class GuardError : public std::runtime_error {
public:
    explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent configuration / arguments.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation requested outside the covered spatial/temporal range.
class RangeError : public std::runtime_error {
public:
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iteration failed to converge; the message carries diagnostics.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A verified identity or bound failed where the algebra says it cannot.
class CheckError : public std::runtime_error {
public:
    explicit CheckError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bsdelab
