#include "ictmc/binary_oracle.hpp"

#include "ictmc/errors.hpp"

#include <cmath>
#include <utility>

namespace ictmc {

void BinaryModel::validate() const {
    auto check = [](double low, double high, const char* name) {
        if (!std::isfinite(low) || !std::isfinite(high))
            throw validation_error(std::string(name) + " rate interval is not finite");
        if (low < 0.0)
            throw validation_error(std::string(name) + " rate interval has negative lower bound");
        if (low > high)
            throw validation_error(std::string(name) + " rate interval is inverted");
    };
    check(q0_low, q0_high, "state-0");
    check(q1_low, q1_high, "state-1");
}

double BinaryModel::norm() const {
    return 2.0 * std::max(q0_high, q1_high);
}

IntervalRateOperator BinaryModel::to_operator(std::vector<std::string> labels) const {
    validate();
    StateSpace space{2, std::move(labels)};
    return IntervalRateOperator(std::move(space),
                                {0.0, q0_low, q1_low, 0.0},
                                {0.0, q0_high, q1_high, 0.0});
}

std::optional<BinaryModel> BinaryModel::from_operator(const IntervalRateOperator& Q) {
    if (Q.size() != 2)
        return std::nullopt;
    return BinaryModel{Q.lower(0, 1), Q.upper(0, 1), Q.lower(1, 0), Q.upper(1, 0)};
}

BinaryModel BinaryModel::healthy_sick() {
    return BinaryModel{1.0 / 52.0, 3.0 / 52.0, 1.0 / 2.0, 2.0};
}

Gamble analytic_transient(const BinaryModel& M, const Gamble& f, double t) {
    M.validate();
    validate_gamble(f, 2);
    if (!std::isfinite(t) || t < 0.0)
        throw validation_error("horizon must be finite and >= 0");
    if (t == 0.0 || f[0] == f[1])
        return f;

    const double span = std::fabs(f[1] - f[0]);
    if (f[0] < f[1]) {
        const double rate_sum = M.q0_low + M.q1_high;
        if (rate_sum == 0.0)
            return f;
        const double h = span * (1.0 - std::exp(-t * rate_sum)) / rate_sum;
        return {f[0] + M.q0_low * h, f[1] - M.q1_high * h};
    }
    const double rate_sum = M.q0_high + M.q1_low;
    if (rate_sum == 0.0)
        return f;
    const double h = span * (1.0 - std::exp(-t * rate_sum)) / rate_sum;
    return {f[0] - M.q0_high * h, f[1] + M.q1_low * h};
}

double analytic_limit(const BinaryModel& M, const Gamble& f) {
    M.validate();
    validate_gamble(f, 2);
    if (f[0] == f[1])
        return f[0];

    const double span = std::fabs(f[1] - f[0]);
    if (f[0] < f[1]) {
        const double rate_sum = M.q0_low + M.q1_high;
        if (rate_sum == 0.0)
            throw inapplicable_error("zero rate sum: no constant limit on this ordering");
        return f[0] + M.q0_low * span / rate_sum;
    }
    const double rate_sum = M.q0_high + M.q1_low;
    if (rate_sum == 0.0)
        throw inapplicable_error("zero rate sum: no constant limit on this ordering");
    return f[0] - M.q0_high * span / rate_sum;
}

double binary_coefficient(const BinaryModel& M, double delta) {
    M.validate();
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw validation_error("Euler step size must be finite and >= 0");
    const double norm = M.norm();
    if (delta * norm > 2.0 + 1e-12)
        throw step_too_large(delta, norm);
    return std::max(std::fabs(1.0 - delta * (M.q0_high + M.q1_low)),
                    std::fabs(1.0 - delta * (M.q0_low + M.q1_high)));
}

} // namespace ictmc
