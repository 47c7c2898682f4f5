#pragma once

#include "ictmc/approximation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace ictmc {

/// Ergodicity verdict: the operator drives every gamble to a constant iff
/// its top class is regular and absorbing.
struct ErgodicityReport {
    std::vector<std::size_t> top_class; ///< states upper reachable from everywhere
    bool regular = false;               ///< top_class non-empty
    bool absorbing = false;             ///< top class lower reachable from everywhere
    bool ergodic = false;               ///< regular && absorbing
};

/// Coefficient-of-ergodicity bracket for a one-step operator; `exact` is
/// filled for two-state and linear (degenerate-interval) operators.
struct CoefficientBounds {
    double lower = 0.0;
    double upper = 0.0;
    std::optional<double> exact;
};

/// Stationary-limit approximation outcome.
struct LimitResult {
    double value = 0.0;            ///< midpoint (max g + min g) / 2
    double guaranteed_error = 0.0; ///< certified |exact limit - value| bound
    std::uint64_t iterations = 0;
    bool converged = false;
};

/// Row-stochastic matrix: entries >= 0, rows sum to 1 within 1e-12.
struct TransitionMatrix {
    std::size_t size = 0;
    std::vector<double> entries; ///< row-major size*size

    double at(std::size_t from, std::size_t to) const {
        return entries[from * size + to];
    }

    void validate() const;
};

/// reach[y][x] is true iff x is upper reachable from y: the closure of
/// edges a -> b with upper(a,b) > 0, plus reflexivity.
std::vector<std::vector<bool>> upper_reachability(const IntervalRateOperator& Q);

/// Regularly-absorbing test. The top class is every state upper reachable
/// from all states; absorption grows B from the top class by adding states
/// with apply_lower(Q, indicator(B)) > 0 until a fixpoint, and holds iff
/// that fixpoint is the whole space.
ErgodicityReport check_ergodic(const IntervalRateOperator& Q);

/// Bounds for the coefficient of ergodicity of (I + delta Q)^m via the
/// subset scan over indicator gambles (upper uses the conjugate operator).
/// Exact value filled for two-state operators and for degenerate intervals.
/// Requires delta * ||Q|| <= 2 and at most 20 states.
CoefficientBounds coefficient_bounds(const IntervalRateOperator& Q,
                                     double delta, std::uint64_t m = 1);

/// Same bracket for an explicit stochastic matrix; lower, upper and exact
/// all agree with delta_coefficient up to rounding.
CoefficientBounds coefficient_bounds(const TransitionMatrix& T);

/// Exact coefficient of ergodicity of a stochastic matrix:
/// max_{x,y} (1/2) sum_z |T(x,z) - T(y,z)|.
double delta_coefficient(const TransitionMatrix& T);

struct ErgodicErrorBounds {
    double epsilon_e = 0.0; ///< m delta^2 ||Q||^2 ||f||_c (1 - beta^k) / (1 - beta)
    double epsilon_d = 0.0; ///< same without the (1 - beta^k) factor
    double beta = 0.0;      ///< contraction coefficient used
};

/// Ergodicity-aware error bounds for n uniform steps of size delta grouped
/// in blocks of m (k = ceil(n/m)). Requires delta * ||Q|| < 2 and a
/// contraction coefficient beta < 1; throws inapplicable_error otherwise.
ErgodicErrorBounds ergodic_error_bound(const IntervalRateOperator& Q, const Gamble& f,
                                       double delta, std::uint64_t m, std::uint64_t n);

/// Smallest uniform n (bisection plus a downward scan of 64 candidates)
/// with m delta^2 ||Q||^2 ||f||_c (1 - beta^k) <= (1 - beta) epsilon for
/// delta = t/n; falls back to the plain uniform n when nothing smaller
/// qualifies. Requires an ergodic operator.
UniformPlan uniform_ergodic_plan(const IntervalRateOperator& Q, const Gamble& f,
                                 double t, double epsilon, std::uint64_t m = 1);

/// Limit strategy: derive the step size from the contraction coefficient so
/// that stopping at centred norm <= epsilon/2 certifies error epsilon.
struct AprioriDelta {
    std::uint64_t m = 1;
};

/// Limit strategy: user-fixed step size; accumulate the running bound and
/// stop once centred norm <= bound, certifying error 2 * bound.
struct RunningBound {
    double delta = 0.0;
};

using LimitStrategy = std::variant<AprioriDelta, RunningBound>;

struct LimitOptions {
    std::uint64_t max_iterations = 1000000000;
    std::uint64_t progress_interval = 1000000;
    /// Called every progress_interval iterations with (iterations, variation).
    std::function<void(std::uint64_t, double)> progress;
};

/// Iterates Euler steps until the gamble is flat enough to certify the
/// stationary limit within epsilon (a-priori strategy) or within twice the
/// running bound. Requires an ergodic operator. Hitting the iteration cap
/// returns converged=false with a finite honest bound.
LimitResult limit_approximate(const IntervalRateOperator& Q, const Gamble& f,
                              double epsilon, const LimitStrategy& strategy,
                              const LimitOptions& options = {});

} // namespace ictmc
