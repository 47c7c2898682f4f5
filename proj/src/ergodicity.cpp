#include "ictmc/ergodicity.hpp"

#include "ictmc/binary_oracle.hpp"
#include "ictmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ictmc {

namespace {

double raw_delta_coefficient(const TransitionMatrix& T) {
    double worst = 0.0;
    for (std::size_t x = 0; x < T.size; ++x) {
        for (std::size_t y = x + 1; y < T.size; ++y) {
            double total = 0.0;
            for (std::size_t z = 0; z < T.size; ++z)
                total += std::fabs(T.at(x, z) - T.at(y, z));
            worst = std::max(worst, total / 2.0);
        }
    }
    return worst;
}

TransitionMatrix one_step_matrix(const IntervalRateOperator& Q, double delta) {
    const std::size_t n = Q.size();
    TransitionMatrix P{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t x = 0; x < n; ++x) {
        double exit_rate = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x)
                continue;
            P.entries[x * n + y] = delta * Q.lower(x, y);
            exit_rate += Q.lower(x, y);
        }
        double stay = 1.0 - delta * exit_rate;
        if (stay < 0.0 && stay > -1e-12)
            stay = 0.0;
        P.entries[x * n + x] = stay;
    }
    return P;
}

TransitionMatrix multiply(const TransitionMatrix& A, const TransitionMatrix& B) {
    const std::size_t n = A.size;
    TransitionMatrix C{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t z = 0; z < n; ++z) {
            const double a = A.at(x, z);
            if (a == 0.0)
                continue;
            for (std::size_t y = 0; y < n; ++y)
                C.entries[x * n + y] += a * B.at(z, y);
        }
    return C;
}

TransitionMatrix matrix_power(TransitionMatrix base, std::uint64_t exponent) {
    const std::size_t n = base.size;
    TransitionMatrix result{n, std::vector<double>(n * n, 0.0)};
    for (std::size_t x = 0; x < n; ++x)
        result.entries[x * n + x] = 1.0;
    while (exponent > 0) {
        if (exponent & 1)
            result = multiply(result, base);
        exponent >>= 1;
        if (exponent > 0)
            base = multiply(base, base);
    }
    return result;
}

void iterate_euler(const IntervalRateOperator& Q, double delta, std::uint64_t count,
                   Gamble& g, Gamble& scratch) {
    for (std::uint64_t i = 0; i < count; ++i)
        detail::euler_step_inplace(Q, delta, g, scratch);
}

/// Tightest available contraction coefficient of (I + delta Q)^m, in the
/// order: exact two-state value, exact linear value, subset-scan upper bound.
double contraction_coefficient(const IntervalRateOperator& Q, double delta,
                               std::uint64_t m) {
    if (auto binary = BinaryModel::from_operator(Q)) {
        if (m == 1)
            return binary_coefficient(*binary, delta);
        double worst = 0.0;
        Gamble scratch(2, 0.0);
        for (unsigned long long mask = 1; mask <= 2; ++mask) {
            Gamble g = indicator_mask(2, mask);
            iterate_euler(Q, delta, m, g, scratch);
            worst = std::max(worst, variation_norm(g));
        }
        return worst;
    }
    if (Q.degenerate())
        return raw_delta_coefficient(matrix_power(one_step_matrix(Q, delta), m));
    return coefficient_bounds(Q, delta, m).upper;
}

} // namespace

void TransitionMatrix::validate() const {
    if (size == 0 || entries.size() != size * size)
        throw validation_error("transition matrix must be square and non-empty");
    for (std::size_t x = 0; x < size; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < size; ++y) {
            const double v = at(x, y);
            if (!std::isfinite(v) || v < 0.0)
                throw validation_error("transition matrix entry (" + std::to_string(x) +
                                       "," + std::to_string(y) +
                                       ") is not a finite probability");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12 * std::max(1.0, std::fabs(sum)))
            throw validation_error("transition matrix row " + std::to_string(x) +
                                   " does not sum to one");
    }
}

std::vector<std::vector<bool>> upper_reachability(const IntervalRateOperator& Q) {
    const std::size_t n = Q.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    std::vector<std::size_t> queue;
    for (std::size_t source = 0; source < n; ++source) {
        auto& row = reach[source];
        row[source] = true;
        queue.assign(1, source);
        while (!queue.empty()) {
            const std::size_t a = queue.back();
            queue.pop_back();
            for (std::size_t b = 0; b < n; ++b)
                if (!row[b] && a != b && Q.upper(a, b) > 0.0) {
                    row[b] = true;
                    queue.push_back(b);
                }
        }
    }
    return reach;
}

ErgodicityReport check_ergodic(const IntervalRateOperator& Q) {
    const std::size_t n = Q.size();
    const auto reach = upper_reachability(Q);

    ErgodicityReport report;
    for (std::size_t x = 0; x < n; ++x) {
        bool from_everywhere = true;
        for (std::size_t y = 0; y < n && from_everywhere; ++y)
            from_everywhere = reach[y][x];
        if (from_everywhere)
            report.top_class.push_back(x);
    }
    report.regular = !report.top_class.empty();

    if (report.regular) {
        std::vector<bool> absorbed(n, false);
        for (std::size_t x : report.top_class)
            absorbed[x] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            Gamble member(n, 0.0);
            for (std::size_t x = 0; x < n; ++x)
                member[x] = absorbed[x] ? 1.0 : 0.0;
            const Gamble pull = apply_lower(Q, member);
            for (std::size_t y = 0; y < n; ++y)
                if (!absorbed[y] && pull[y] > 0.0) {
                    absorbed[y] = true;
                    grew = true;
                }
        }
        report.absorbing =
            std::all_of(absorbed.begin(), absorbed.end(), [](bool b) { return b; });
    }

    report.ergodic = report.regular && report.absorbing;
    return report;
}

CoefficientBounds coefficient_bounds(const IntervalRateOperator& Q,
                                     double delta, std::uint64_t m) {
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw validation_error("Euler step size must be finite and >= 0");
    if (m == 0)
        throw validation_error("block size m must be >= 1");
    const double norm = operator_norm(Q);
    if (delta * norm > 2.0 + 1e-12)
        throw step_too_large(delta, norm);
    const std::size_t n = Q.size();
    if (n > 20)
        throw inapplicable_error("subset scan limited to 20 states, got " +
                                 std::to_string(n));

    CoefficientBounds bounds;
    if (n == 1) {
        bounds.exact = 0.0;
        return bounds;
    }

    const unsigned long long full = (1ull << n) - 1ull;
    Gamble scratch(n, 0.0);
    for (unsigned long long i = 0; i <= full; ++i) {
        const unsigned long long mask = i ^ (i >> 1); // Gray-code order
        if (mask == 0 || mask == full)
            continue;
        Gamble low_image = indicator_mask(n, mask);
        iterate_euler(Q, delta, m, low_image, scratch);

        Gamble high_image(n, 0.0);
        for (std::size_t x = 0; x < n; ++x)
            high_image[x] = (mask & (1ull << x)) ? -1.0 : 0.0;
        iterate_euler(Q, delta, m, high_image, scratch);
        for (double& v : high_image)
            v = -v;

        double low_min = low_image[0], low_max = low_image[0], high_max = high_image[0];
        for (std::size_t x = 1; x < n; ++x) {
            low_min = std::min(low_min, low_image[x]);
            low_max = std::max(low_max, low_image[x]);
            high_max = std::max(high_max, high_image[x]);
        }
        bounds.lower = std::max(bounds.lower, low_max - low_min);
        bounds.upper = std::max(bounds.upper, high_max - low_min);
    }

    if (auto binary = BinaryModel::from_operator(Q))
        bounds.exact = m == 1 ? binary_coefficient(*binary, delta) : bounds.lower;
    else if (Q.degenerate())
        bounds.exact = raw_delta_coefficient(matrix_power(one_step_matrix(Q, delta), m));
    return bounds;
}

CoefficientBounds coefficient_bounds(const TransitionMatrix& T) {
    T.validate();
    const std::size_t n = T.size;
    if (n > 20)
        throw inapplicable_error("subset scan limited to 20 states, got " +
                                 std::to_string(n));

    CoefficientBounds bounds;
    if (n == 1) {
        bounds.exact = 0.0;
        return bounds;
    }
    const unsigned long long full = (1ull << n) - 1ull;
    for (unsigned long long i = 0; i <= full; ++i) {
        const unsigned long long mask = i ^ (i >> 1);
        if (mask == 0 || mask == full)
            continue;
        double image_min = std::numeric_limits<double>::infinity();
        double image_max = -image_min;
        for (std::size_t x = 0; x < n; ++x) {
            double acc = 0.0;
            for (std::size_t y = 0; y < n; ++y)
                if (mask & (1ull << y))
                    acc += T.at(x, y);
            image_min = std::min(image_min, acc);
            image_max = std::max(image_max, acc);
        }
        bounds.lower = std::max(bounds.lower, image_max - image_min);
        bounds.upper = std::max(bounds.upper, image_max - image_min);
    }
    bounds.exact = raw_delta_coefficient(T);
    return bounds;
}

double delta_coefficient(const TransitionMatrix& T) {
    T.validate();
    return raw_delta_coefficient(T);
}

ErgodicErrorBounds ergodic_error_bound(const IntervalRateOperator& Q, const Gamble& f,
                                       double delta, std::uint64_t m, std::uint64_t n) {
    validate_gamble(f, Q.size());
    if (m == 0)
        throw validation_error("block size m must be >= 1");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw validation_error("Euler step size must be finite and >= 0");

    const double centred = centred_norm(f);
    const double norm = operator_norm(Q);
    const double base = static_cast<double>(m) * delta * delta * norm * norm * centred;
    if (base == 0.0)
        return {0.0, 0.0, 0.0};
    if (!(delta * norm < 2.0))
        throw step_too_large(delta, norm);

    const double beta = contraction_coefficient(Q, delta, m);
    if (!(beta < 1.0)) {
        std::ostringstream msg;
        msg << "contraction coefficient " << beta
            << " is not below 1; the ergodic error bound is vacuous";
        throw inapplicable_error(msg.str());
    }
    const std::uint64_t k = (n + m - 1) / m;
    const double epsilon_d = base / (1.0 - beta);
    const double epsilon_e =
        epsilon_d * (1.0 - std::pow(beta, static_cast<double>(k)));
    return {epsilon_e, epsilon_d, beta};
}

UniformPlan uniform_ergodic_plan(const IntervalRateOperator& Q, const Gamble& f,
                                 double t, double epsilon, std::uint64_t m) {
    if (m == 0)
        throw validation_error("block size m must be >= 1");
    if (!check_ergodic(Q).ergodic)
        throw inapplicable_error("operator is not ergodic");

    const UniformPlan plain = uniform_plan(Q, f, t, epsilon);
    if (plain.n == 0)
        return plain;

    const double norm = operator_norm(Q);
    const double centred = centred_norm(f);
    const auto qualifies = [&](std::uint64_t n) {
        const double delta = t / static_cast<double>(n);
        const double beta = contraction_coefficient(Q, delta, m);
        if (!(beta < 1.0))
            return false;
        const std::uint64_t k = (n + m - 1) / m;
        const double lhs = static_cast<double>(m) * delta * delta * norm * norm *
                           centred * (1.0 - std::pow(beta, static_cast<double>(k)));
        const double rhs = (1.0 - beta) * epsilon;
        return lhs <= rhs * (1.0 + 1e-12);
    };

    if (!qualifies(plain.n))
        return plain;

    const std::uint64_t floor_n =
        std::max<std::uint64_t>(1, detail::ceil_snap(t * norm / 2.0));
    std::uint64_t best = plain.n;
    if (qualifies(floor_n)) {
        best = floor_n;
    } else {
        // Bisection assuming the predicate flips once, then a downward scan
        // to confirm local minimality; the result is the smallest n found.
        std::uint64_t lo = floor_n, hi = best;
        while (lo + 1 < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            (qualifies(mid) ? hi : lo) = mid;
        }
        best = hi;
        const std::uint64_t window =
            best > floor_n + 64 ? best - 64 : floor_n;
        for (std::uint64_t cand = best; cand-- > window;)
            if (qualifies(cand))
                best = cand;
    }
    return {best, t / static_cast<double>(best), epsilon};
}

LimitResult limit_approximate(const IntervalRateOperator& Q, const Gamble& f,
                              double epsilon, const LimitStrategy& strategy,
                              const LimitOptions& options) {
    validate_gamble(f, Q.size());
    if (!std::isfinite(epsilon) || !(epsilon > 0.0))
        throw validation_error("epsilon must be finite and > 0");
    if (!check_ergodic(Q).ergodic)
        throw inapplicable_error("operator is not ergodic");

    const auto midpoint = [](const Gamble& g) {
        double lo = g[0], hi = g[0];
        for (double v : g) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return (hi + lo) / 2.0;
    };

    if (centred_norm(f) == 0.0)
        return {f[0], 0.0, 0, true};

    const double norm = operator_norm(Q);
    const std::uint64_t interval = std::max<std::uint64_t>(1, options.progress_interval);
    Gamble g = f;
    Gamble scratch(f.size(), 0.0);

    if (const auto* apriori = std::get_if<AprioriDelta>(&strategy)) {
        const std::uint64_t m = apriori->m;
        if (m == 0)
            throw validation_error("block size m must be >= 1");
        const double centred = centred_norm(f);
        const auto admissible = [&](double delta) {
            if (!(delta * norm < 2.0))
                return false;
            const double beta = contraction_coefficient(Q, delta, m);
            if (!(beta < 1.0))
                return false;
            return 2.0 * static_cast<double>(m) * delta * delta * norm * norm *
                       centred <=
                   (1.0 - beta) * epsilon;
        };

        double delta = 1.0 / norm;
        int halvings = 0;
        while (!admissible(delta)) {
            delta /= 2.0;
            if (++halvings > 1080 || delta == 0.0)
                throw inapplicable_error(
                    "no step size satisfies the a-priori limit bound; "
                    "the contraction coefficient stays at 1");
        }
        // Largest admissible step within the bracket found, to keep the
        // iteration count down.
        double bad = std::min(2.0 * delta, 2.0 / norm);
        for (int i = 0; i < 60; ++i) {
            const double mid = (delta + bad) / 2.0;
            (admissible(mid) ? delta : bad) = mid;
        }

        std::uint64_t iterations = 0;
        while (centred_norm(g) > epsilon / 2.0) {
            if (iterations >= options.max_iterations)
                return {midpoint(g), centred_norm(g) + epsilon / 2.0, iterations, false};
            detail::euler_step_inplace(Q, delta, g, scratch);
            ++iterations;
            if (options.progress && iterations % interval == 0)
                options.progress(iterations, variation_norm(g));
        }
        return {midpoint(g), epsilon, iterations, true};
    }

    const auto& running = std::get<RunningBound>(strategy);
    const double delta = running.delta;
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw validation_error("running-bound step size must be finite and > 0");
    if (delta * norm > 2.0 + 1e-12)
        throw step_too_large(delta, norm);

    const double factor = delta * delta * norm * norm;
    double bound = 0.0;
    std::uint64_t iterations = 0;
    for (;;) {
        const double centred = centred_norm(g);
        if (centred <= bound) {
            const double guaranteed = 2.0 * bound;
            return {midpoint(g), guaranteed, iterations, guaranteed <= epsilon};
        }
        if (iterations >= options.max_iterations)
            return {midpoint(g), centred + bound, iterations, false};
        bound += factor * centred;
        detail::euler_step_inplace(Q, delta, g, scratch);
        ++iterations;
        if (options.progress && iterations % interval == 0)
            options.progress(iterations, variation_norm(g));
    }
}

} // namespace ictmc
