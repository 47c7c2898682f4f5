#pragma once

#include "ictmc/rate_operator.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ictmc {

/// Uniform grid plan: n Euler steps of size delta covering the horizon.
struct UniformPlan {
    std::uint64_t n = 0;
    double delta = 0.0;
    double target_epsilon = 0.0;
};

/// A run of `count` consecutive Euler steps of the same size.
struct StepBlock {
    double delta = 0.0;
    std::uint64_t count = 0;
};

/// Result of a grid approximation run.
struct ApproxTrace {
    Gamble result;
    /// Running error bound; equals the a-priori target when tracking is off.
    double epsilon_prime = 0.0;
    std::uint64_t total_iterations = 0;
    std::vector<StepBlock> steps;
    bool stopped_early = false;
};

struct ApproxOptions {
    /// Accumulate the per-iteration error bound (Table-style eps').
    bool track_bound = true;
    /// Adaptive only: per block charge count * centred(block start) instead
    /// of the tighter per-iteration sum.
    bool loose_block_bound = false;
    /// Stop as soon as remaining_cost_stop allows (requires track_bound).
    bool early_stop = false;
};

namespace detail {

/// Ceiling for iteration counts that snaps ratios within 1e-9 relative of
/// an integer to that integer first.
std::uint64_t ceil_snap(double ratio);

} // namespace detail

/// Uniform plan: n = 0 when the gamble is constant, the operator is zero,
/// or t = 0; otherwise n = ceil(max{t||Q||/2, t^2 ||Q||^2 ||f||_c / eps})
/// and delta = t/n. Ratios within 1e-9 relative of an integer snap to it
/// before the ceiling.
UniformPlan uniform_plan(const IntervalRateOperator& Q, const Gamble& f,
                         double t, double epsilon);

/// Runs an already-computed uniform plan.
ApproxTrace run_uniform_plan(const IntervalRateOperator& Q, const Gamble& f,
                             const UniformPlan& plan,
                             const ApproxOptions& options = {});

/// Plans and runs the uniform grid; the result is within epsilon_prime
/// (<= epsilon) of the exact lower expectation at horizon t.
ApproxTrace uniform_approximate(const IntervalRateOperator& Q, const Gamble& f,
                                double t, double epsilon,
                                const ApproxOptions& options = {});

/// Adaptive m-fold grid: blocks of m equal steps whose size is re-derived
/// from the current centred norm; the final block shrinks to land exactly
/// on the horizon. Same epsilon guarantee; never more iterations than the
/// uniform plan.
ApproxTrace adaptive_approximate(const IntervalRateOperator& Q, const Gamble& f,
                                 double t, double epsilon, std::uint64_t m,
                                 const ApproxOptions& options = {});

/// Left-to-right composition of Euler steps over the given step sizes.
Gamble compose_steps(const IntervalRateOperator& Q, const Gamble& f,
                     std::span<const double> deltas);

/// True when variation(g) <= epsilon - epsilon_so_far: the run may stop
/// now and still be within epsilon of the exact value at the full horizon.
bool remaining_cost_stop(double epsilon, double epsilon_so_far, const Gamble& g);

} // namespace ictmc
