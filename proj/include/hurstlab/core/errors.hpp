#pragma once

#include <stdexcept>
#include <string>

namespace hurstlab {

// Invalid arguments, broken preconditions, bad configuration. CLI exit code 1.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Quadrature/iteration budgets exceeded, non-convergence. CLI exit code 2.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internally inconsistent model state (e.g. a covariance matrix that is not
// positive semidefinite even after the ridge retry). CLI exit code 2.
struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hurstlab
