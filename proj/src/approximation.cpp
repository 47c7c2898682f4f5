#include "ictmc/approximation.hpp"

#include "ictmc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ictmc {

namespace detail {

std::uint64_t ceil_snap(double ratio) {
    if (!(ratio > 0.0))
        return 0;
    if (ratio > 9.0e18)
        throw inapplicable_error("required iteration count exceeds the 64-bit range");
    const double nearest = std::round(ratio);
    if (std::fabs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio))
        return static_cast<std::uint64_t>(nearest);
    return static_cast<std::uint64_t>(std::ceil(ratio));
}

} // namespace detail

namespace {

void check_horizon_and_epsilon(double t, double epsilon) {
    if (!std::isfinite(t) || t < 0.0)
        throw validation_error("horizon must be finite and >= 0");
    if (!std::isfinite(epsilon) || !(epsilon > 0.0))
        throw validation_error("epsilon must be finite and > 0");
}

void check_options(const ApproxOptions& options) {
    if (options.early_stop && !options.track_bound)
        throw validation_error("early_stop requires track_bound");
}

} // namespace

UniformPlan uniform_plan(const IntervalRateOperator& Q, const Gamble& f,
                         double t, double epsilon) {
    validate_gamble(f, Q.size());
    check_horizon_and_epsilon(t, epsilon);
    const double centred = centred_norm(f);
    const double norm = operator_norm(Q);
    if (centred == 0.0 || norm == 0.0 || t == 0.0)
        return {0, 0.0, epsilon};
    const double validity = t * norm / 2.0;
    const double accuracy = t * t * norm * norm * centred / epsilon;
    const std::uint64_t n = std::max<std::uint64_t>(
        1, detail::ceil_snap(std::max(validity, accuracy)));
    return {n, t / static_cast<double>(n), epsilon};
}

ApproxTrace run_uniform_plan(const IntervalRateOperator& Q, const Gamble& f,
                             const UniformPlan& plan, const ApproxOptions& options) {
    validate_gamble(f, Q.size());
    check_options(options);
    ApproxTrace trace;
    trace.result = f;
    if (plan.n == 0)
        return trace;

    const double norm = operator_norm(Q);
    if (plan.delta * norm > 2.0 + 1e-12)
        throw step_too_large(plan.delta, norm);

    const double factor = plan.delta * plan.delta * norm * norm;
    Gamble g = f;
    Gamble scratch(f.size(), 0.0);
    double bound = 0.0;
    std::uint64_t performed = 0;
    for (std::uint64_t i = 0; i < plan.n; ++i) {
        if (options.early_stop && remaining_cost_stop(plan.target_epsilon, bound, g)) {
            trace.stopped_early = true;
            break;
        }
        if (options.track_bound)
            bound += factor * centred_norm(g);
        detail::euler_step_inplace(Q, plan.delta, g, scratch);
        ++performed;
    }
    trace.result = std::move(g);
    trace.total_iterations = performed;
    if (performed > 0)
        trace.steps.push_back({plan.delta, performed});
    trace.epsilon_prime = options.track_bound ? bound : plan.target_epsilon;
    return trace;
}

ApproxTrace uniform_approximate(const IntervalRateOperator& Q, const Gamble& f,
                                double t, double epsilon, const ApproxOptions& options) {
    return run_uniform_plan(Q, f, uniform_plan(Q, f, t, epsilon), options);
}

ApproxTrace adaptive_approximate(const IntervalRateOperator& Q, const Gamble& f,
                                 double t, double epsilon, std::uint64_t m,
                                 const ApproxOptions& options) {
    validate_gamble(f, Q.size());
    check_horizon_and_epsilon(t, epsilon);
    check_options(options);
    if (m == 0)
        throw validation_error("block size m must be >= 1");

    ApproxTrace trace;
    trace.result = f;
    const double norm = operator_norm(Q);
    double centred = centred_norm(f);
    if (centred == 0.0 || norm == 0.0 || t == 0.0) {
        trace.epsilon_prime = 0.0;
        return trace;
    }

    const double norm2 = norm * norm;
    Gamble g = f;
    Gamble scratch(f.size(), 0.0);
    double remaining = t;
    double bound = 0.0;
    while (remaining > 0.0 && centred > 0.0) {
        if (options.early_stop && remaining_cost_stop(epsilon, bound, g)) {
            trace.stopped_early = true;
            break;
        }
        double delta = std::min({remaining, 2.0 / norm, epsilon / (t * norm2 * centred)});
        if (!(delta > 0.0))
            throw inapplicable_error("adaptive step size underflowed to zero");
        std::uint64_t count = m;
        bool final_block = false;
        if (static_cast<double>(m) * delta > remaining) {
            count = std::max<std::uint64_t>(1, detail::ceil_snap(remaining / delta));
            delta = remaining / static_cast<double>(count);
            final_block = true;
        }
        const double factor = delta * delta * norm2;
        for (std::uint64_t j = 0; j < count; ++j) {
            if (options.track_bound && !options.loose_block_bound)
                bound += factor * centred_norm(g);
            detail::euler_step_inplace(Q, delta, g, scratch);
        }
        if (options.track_bound && options.loose_block_bound)
            bound += factor * static_cast<double>(count) * centred;
        trace.steps.push_back({delta, count});
        trace.total_iterations += count;
        remaining = final_block ? 0.0 : remaining - static_cast<double>(count) * delta;
        centred = centred_norm(g);
    }
    trace.result = std::move(g);
    trace.epsilon_prime = options.track_bound ? bound : epsilon;
    return trace;
}

Gamble compose_steps(const IntervalRateOperator& Q, const Gamble& f,
                     std::span<const double> deltas) {
    validate_gamble(f, Q.size());
    const double norm = operator_norm(Q);
    for (double delta : deltas) {
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw validation_error("Euler step size must be finite and >= 0");
        if (delta * norm > 2.0 + 1e-12)
            throw step_too_large(delta, norm);
    }
    Gamble g = f;
    Gamble scratch(f.size(), 0.0);
    for (double delta : deltas)
        detail::euler_step_inplace(Q, delta, g, scratch);
    return g;
}

bool remaining_cost_stop(double epsilon, double epsilon_so_far, const Gamble& g) {
    if (!(epsilon_so_far <= epsilon))
        throw validation_error("accumulated bound already exceeds epsilon");
    return variation_norm(g) <= epsilon - epsilon_so_far;
}

} // namespace ictmc
