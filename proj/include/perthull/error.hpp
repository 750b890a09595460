// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace perthull {

// Input outside an operation's domain (bad dimension, radius, height range...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Geometric input too close to a tie for the floating-point predicates to
// classify.  Raised instead of guessing.
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation point outside the region where a piecewise surface is defined.
class OutOfWindowError : public std::runtime_error {
public:
    explicit OutOfWindowError(const std::string& what) : std::runtime_error(what) {}
};

// Inverse exponential map evaluated at (or numerically at) the antipode.
class SingularityError : public DomainError {
public:
    explicit SingularityError(const std::string& what) : DomainError(what) {}
};

}  // namespace perthull
