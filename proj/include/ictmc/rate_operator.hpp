#pragma once

#include "ictmc/gamble.hpp"

#include <cstddef>
#include <vector>

namespace ictmc {

/// Lower transition rate operator given by independent off-diagonal rate
/// intervals [lower(x,y), upper(x,y)]. Applying it to a gamble minimizes
/// sum_{y != x} q(x,y) (f(y) - f(x)) over the intervals, row by row.
/// Exact rate matrices are the degenerate case lower == upper.
class IntervalRateOperator {
public:
    /// Matrices are row-major size*size; diagonal entries are ignored and
    /// stored as zero. Throws validation_error unless
    /// 0 <= lower(x,y) <= upper(x,y) < inf for all x != y.
    IntervalRateOperator(StateSpace space,
                         std::vector<double> lower,
                         std::vector<double> upper);

    const StateSpace& space() const { return space_; }
    std::size_t size() const { return space_.size; }

    double lower(std::size_t from, std::size_t to) const {
        return lower_[from * space_.size + to];
    }
    double upper(std::size_t from, std::size_t to) const {
        return upper_[from * space_.size + to];
    }

    /// True when every interval is a point (the operator is linear).
    bool degenerate() const { return degenerate_; }

private:
    StateSpace space_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    bool degenerate_ = false;
};

/// Precise transition rate matrix: off-diagonal entries >= 0, rows sum to
/// zero within 1e-12 relative to the row magnitude.
struct RateMatrix {
    std::size_t size = 0;
    std::vector<double> entries; ///< row-major size*size

    double at(std::size_t from, std::size_t to) const {
        return entries[from * size + to];
    }

    void validate() const;
};

/// Applies a rate matrix as a generator: component x is
/// sum_{y != x} Q(x,y) (f(y) - f(x)). For zero-row-sum matrices this equals
/// the matrix-vector product, with the same accumulation order as
/// apply_lower so corner matrices reproduce it bit for bit.
Gamble apply(const RateMatrix& Q, const Gamble& f);

/// Lower rate operator applied to f: row minimum picks lower(x,y) when
/// f(y) >= f(x) and upper(x,y) otherwise.
Gamble apply_lower(const IntervalRateOperator& Q, const Gamble& f);

/// Conjugate upper application: -apply_lower(Q, -f), bit for bit.
Gamble apply_upper(const IntervalRateOperator& Q, const Gamble& f);

/// Operator norm 2 * max_x sum_{y != x} upper(x,y).
double operator_norm(const IntervalRateOperator& Q);

/// One Euler step f + delta * apply_lower(Q, f). Throws step_too_large
/// unless delta >= 0 and delta * operator_norm(Q) <= 2 (1e-12 slack),
/// the exact condition for the step to be a lower transition operator.
Gamble euler_step(const IntervalRateOperator& Q, double delta, const Gamble& f);

/// Brute-force envelope: componentwise minimum of Q'f over all corner rate
/// matrices (every off-diagonal at its lower or upper bound). Oracle for
/// apply_lower; throws inapplicable_error for more than 5 states.
Gamble corner_envelope_apply(const IntervalRateOperator& Q, const Gamble& f);

/// The greedy corner matrix achieving apply_lower(Q, f): off-diagonal
/// lower(x,y) when f(y) >= f(x) (ties included) else upper(x,y), diagonal
/// the negated row sum. apply(result, f) == apply_lower(Q, f) exactly.
RateMatrix dominating_matrix_for(const IntervalRateOperator& Q, const Gamble& f);

namespace detail {

/// Unchecked application kernel; f and out must hold Q.size() entries and
/// must not alias.
void apply_lower_into(const IntervalRateOperator& Q, const double* f, double* out) noexcept;

/// Unchecked in-place Euler step using scratch for the rate image.
void euler_step_inplace(const IntervalRateOperator& Q, double delta,
                        std::vector<double>& f, std::vector<double>& scratch) noexcept;

} // namespace detail

} // namespace ictmc
