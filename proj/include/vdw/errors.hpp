#pragma once

#include <stdexcept>
#include <string>

namespace vdw {

/// Input outside the domain where an expression is defined (R <= 0, omega <= 0, t < 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised by the off-resonant pulse evaluators when |Omega| is within the guard band of |Delta_AB|.
/// Callers should switch to the resonant branch.
class ResonanceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Time kernel whose nesting or switching cannot be integrated.
class KernelError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical procedure failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace vdw
