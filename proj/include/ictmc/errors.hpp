#pragma once

#include <stdexcept>
#include <string>

namespace ictmc {

/// Input could not be read or decoded (CLI exit code 2).
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input was decoded but violates an invariant (CLI exit code 3).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inputs are valid but the requested computation has no defined answer,
/// e.g. a grid step too large for the operator norm or a vacuous
/// contraction bound (CLI exit code 4).
struct inapplicable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Euler step size exceeds the admissible bound 2 / operator norm.
struct step_too_large : inapplicable_error {
    double delta;
    double norm;
    double max_delta;

    step_too_large(double delta_, double norm_);
};

} // namespace ictmc
