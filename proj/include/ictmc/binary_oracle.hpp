#pragma once

#include "ictmc/rate_operator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ictmc {

/// Two-state interval rate model with closed-form transient and limit
/// solutions; the independent oracle for approximation errors.
struct BinaryModel {
    double q0_low = 0.0;  ///< lower rate state 0 -> 1
    double q0_high = 0.0; ///< upper rate state 0 -> 1
    double q1_low = 0.0;  ///< lower rate state 1 -> 0
    double q1_high = 0.0; ///< upper rate state 1 -> 0

    /// Throws validation_error unless 0 <= low <= high on both pairs.
    void validate() const;

    /// Operator norm 2 * max(q0_high, q1_high).
    double norm() const;

    IntervalRateOperator to_operator(std::vector<std::string> labels = {}) const;

    /// Extracts the model from any two-state interval operator.
    static std::optional<BinaryModel> from_operator(const IntervalRateOperator& Q);

    /// The running example: q0 in [1/52, 3/52], q1 in [1/2, 2].
    static BinaryModel healthy_sick();
};

/// Exact lower expectation at horizon t. For f(0) <= f(1) the solution is
/// f(0) + q0_low * h(t) and f(1) - q1_high * h(t) with
/// h(t) = ||f||_v (1 - exp(-t s)) / s, s = q0_low + q1_high; the branch
/// f(0) >= f(1) swaps to q0_high, q1_low. A zero rate sum leaves the
/// gamble static: f is returned unchanged.
Gamble analytic_transient(const BinaryModel& M, const Gamble& f, double t);

/// Exact stationary limit, the common component value as t -> infinity.
/// Throws inapplicable_error when the relevant rate sum is zero (no
/// constant limit on that ordering).
double analytic_limit(const BinaryModel& M, const Gamble& f);

/// Exact coefficient of ergodicity of one Euler step:
/// max{|1 - delta (q0_high + q1_low)|, |1 - delta (q0_low + q1_high)|}.
/// Requires delta * norm <= 2.
double binary_coefficient(const BinaryModel& M, double delta);

} // namespace ictmc
