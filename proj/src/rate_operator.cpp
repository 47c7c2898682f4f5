#include "ictmc/rate_operator.hpp"

#include "ictmc/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ictmc {

namespace {

std::string pair_text(std::size_t x, std::size_t y) {
    return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

} // namespace

step_too_large::step_too_large(double delta_, double norm_)
    : inapplicable_error([&] {
          std::ostringstream msg;
          msg << "Euler step " << delta_ << " too large for operator norm "
              << norm_ << "; the step must not exceed 2/norm = " << 2.0 / norm_;
          return msg.str();
      }()),
      delta(delta_), norm(norm_), max_delta(2.0 / norm_) {}

IntervalRateOperator::IntervalRateOperator(StateSpace space,
                                           std::vector<double> lower,
                                           std::vector<double> upper)
    : space_(std::move(space)), lower_(std::move(lower)), upper_(std::move(upper)) {
    space_.validate();
    const std::size_t n = space_.size;
    if (lower_.size() != n * n || upper_.size() != n * n)
        throw validation_error("rate bound matrices must be " + std::to_string(n) +
                               "x" + std::to_string(n));
    degenerate_ = true;
    for (std::size_t x = 0; x < n; ++x) {
        lower_[x * n + x] = 0.0;
        upper_[x * n + x] = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y)
                continue;
            const double l = lower_[x * n + y];
            const double u = upper_[x * n + y];
            if (!std::isfinite(l) || !std::isfinite(u))
                throw validation_error("rate interval " + pair_text(x, y) +
                                       " is not finite");
            if (l < 0.0)
                throw validation_error("rate interval " + pair_text(x, y) +
                                       " has negative lower bound");
            if (l > u)
                throw validation_error("rate interval " + pair_text(x, y) +
                                       " is inverted (low > high)");
            if (l != u)
                degenerate_ = false;
        }
    }
}

void RateMatrix::validate() const {
    if (size == 0 || entries.size() != size * size)
        throw validation_error("rate matrix must be square and non-empty");
    for (std::size_t x = 0; x < size; ++x) {
        double sum = 0.0;
        double magnitude = 0.0;
        for (std::size_t y = 0; y < size; ++y) {
            const double v = at(x, y);
            if (!std::isfinite(v))
                throw validation_error("rate matrix entry " + pair_text(x, y) +
                                       " is not finite");
            if (x != y && v < 0.0)
                throw validation_error("rate matrix entry " + pair_text(x, y) +
                                       " is negative off the diagonal");
            sum += v;
            magnitude += std::fabs(v);
        }
        if (std::fabs(sum) > 1e-12 * std::max(1.0, magnitude))
            throw validation_error("rate matrix row " + std::to_string(x) +
                                   " does not sum to zero");
    }
}

namespace detail {

void apply_lower_into(const IntervalRateOperator& Q, const double* f, double* out) noexcept {
    const std::size_t n = Q.size();
    for (std::size_t x = 0; x < n; ++x) {
        const double fx = f[x];
        double acc = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x)
                continue;
            const double diff = f[y] - fx;
            const double q = diff >= 0.0 ? Q.lower(x, y) : Q.upper(x, y);
            acc += q * diff;
        }
        out[x] = acc;
    }
}

void euler_step_inplace(const IntervalRateOperator& Q, double delta,
                        std::vector<double>& f, std::vector<double>& scratch) noexcept {
    apply_lower_into(Q, f.data(), scratch.data());
    const std::size_t n = Q.size();
    for (std::size_t x = 0; x < n; ++x)
        f[x] += delta * scratch[x];
}

} // namespace detail

Gamble apply(const RateMatrix& Q, const Gamble& f) {
    validate_gamble(f, Q.size);
    Gamble out(Q.size, 0.0);
    for (std::size_t x = 0; x < Q.size; ++x) {
        const double fx = f[x];
        double acc = 0.0;
        for (std::size_t y = 0; y < Q.size; ++y) {
            if (y == x)
                continue;
            acc += Q.at(x, y) * (f[y] - fx);
        }
        out[x] = acc;
    }
    return out;
}

Gamble apply_lower(const IntervalRateOperator& Q, const Gamble& f) {
    validate_gamble(f, Q.size());
    Gamble out(Q.size(), 0.0);
    detail::apply_lower_into(Q, f.data(), out.data());
    return out;
}

Gamble apply_upper(const IntervalRateOperator& Q, const Gamble& f) {
    validate_gamble(f, Q.size());
    Gamble neg(f.size());
    for (std::size_t x = 0; x < f.size(); ++x)
        neg[x] = -f[x];
    Gamble out(Q.size(), 0.0);
    detail::apply_lower_into(Q, neg.data(), out.data());
    for (double& v : out)
        v = -v;
    return out;
}

double operator_norm(const IntervalRateOperator& Q) {
    const std::size_t n = Q.size();
    double max_exit = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        double exit_rate = 0.0;
        for (std::size_t y = 0; y < n; ++y)
            if (y != x)
                exit_rate += Q.upper(x, y);
        max_exit = std::max(max_exit, exit_rate);
    }
    return 2.0 * max_exit;
}

Gamble euler_step(const IntervalRateOperator& Q, double delta, const Gamble& f) {
    validate_gamble(f, Q.size());
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw validation_error("Euler step size must be finite and >= 0");
    const double norm = operator_norm(Q);
    if (delta * norm > 2.0 + 1e-12)
        throw step_too_large(delta, norm);
    Gamble out(Q.size(), 0.0);
    detail::apply_lower_into(Q, f.data(), out.data());
    for (std::size_t x = 0; x < f.size(); ++x)
        out[x] = f[x] + delta * out[x];
    return out;
}

Gamble corner_envelope_apply(const IntervalRateOperator& Q, const Gamble& f) {
    validate_gamble(f, Q.size());
    const std::size_t n = Q.size();
    if (n > 5)
        throw inapplicable_error("corner envelope limited to 5 states, got " +
                                 std::to_string(n));
    // Off-diagonal cells in row-major order; bit b of the corner index picks
    // the upper bound for cell b.
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (x != y)
                cells.emplace_back(x, y);

    Gamble best(n, std::numeric_limits<double>::infinity());
    std::vector<double> rates(n * n, 0.0);
    const unsigned long long corners = 1ull << cells.size();
    for (unsigned long long corner = 0; corner < corners; ++corner) {
        for (std::size_t b = 0; b < cells.size(); ++b) {
            const auto [x, y] = cells[b];
            rates[x * n + y] =
                (corner & (1ull << b)) ? Q.upper(x, y) : Q.lower(x, y);
        }
        for (std::size_t x = 0; x < n; ++x) {
            const double fx = f[x];
            double acc = 0.0;
            for (std::size_t y = 0; y < n; ++y)
                if (y != x)
                    acc += rates[x * n + y] * (f[y] - fx);
            best[x] = std::min(best[x], acc);
        }
    }
    return best;
}

RateMatrix dominating_matrix_for(const IntervalRateOperator& Q, const Gamble& f) {
    validate_gamble(f, Q.size());
    const std::size_t n = Q.size();
    RateMatrix M{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t x = 0; x < n; ++x) {
        double row_sum = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x)
                continue;
            const double q = f[y] >= f[x] ? Q.lower(x, y) : Q.upper(x, y);
            M.entries[x * n + y] = q;
            row_sum += q;
        }
        M.entries[x * n + x] = -row_sum;
    }
    return M;
}

} // namespace ictmc
