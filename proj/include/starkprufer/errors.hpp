#pragma once

#include <stdexcept>
#include <string>

namespace starkprufer {

// Argument outside the range where an evaluator is validated, or NaN/inf input.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A numerical procedure could not meet its accuracy contract.
struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A request exceeds a documented resource guard (term counts, step counts).
struct resource_error : std::length_error {
    using std::length_error::length_error;
};

// Inputs violate a precondition of an operation (bad windows, identical angles, ...).
struct validity_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iterative solvers (root brackets, adaptive quadrature) that failed to converge.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace starkprufer
