#include "ictmc/gamble.hpp"

#include "ictmc/errors.hpp"

#include <cassert>
#include <cmath>
#include <unordered_set>

namespace ictmc {

void StateSpace::validate() const {
    if (size == 0)
        throw validation_error("state space must have at least one state");
    if (labels.empty())
        return;
    if (labels.size() != size)
        throw validation_error("state space has " + std::to_string(size) +
                               " states but " + std::to_string(labels.size()) +
                               " labels");
    std::unordered_set<std::string_view> seen;
    for (const auto& label : labels)
        if (!seen.insert(label).second)
            throw validation_error("duplicate state label \"" + label + "\"");
}

std::string StateSpace::label_of(std::size_t x) const {
    if (x < labels.size())
        return labels[x];
    return std::to_string(x);
}

std::optional<std::size_t> StateSpace::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label)
            return i;
    return std::nullopt;
}

GambleNorms gamble_norms(const Gamble& f) {
    assert(!f.empty());
    double max_abs = 0.0;
    double hi = f[0];
    double lo = f[0];
    for (double v : f) {
        max_abs = std::max(max_abs, std::fabs(v));
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    const double variation = hi - lo;
    return {max_abs, variation, variation / 2.0};
}

double variation_norm(const Gamble& f) {
    assert(!f.empty());
    double hi = f[0];
    double lo = f[0];
    for (double v : f) {
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    return hi - lo;
}

double centred_norm(const Gamble& f) {
    return variation_norm(f) / 2.0;
}

void validate_gamble(const Gamble& f, std::size_t size) {
    if (f.size() != size)
        throw validation_error("gamble has " + std::to_string(f.size()) +
                               " entries, state space has " + std::to_string(size));
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i]))
            throw validation_error("gamble entry " + std::to_string(i) +
                                   " is not finite");
}

Gamble indicator(std::size_t size, const std::vector<std::size_t>& states) {
    Gamble f(size, 0.0);
    for (std::size_t x : states) {
        assert(x < size);
        f[x] = 1.0;
    }
    return f;
}

Gamble indicator_mask(std::size_t size, unsigned long long mask) {
    Gamble f(size, 0.0);
    for (std::size_t x = 0; x < size; ++x)
        if (mask & (1ull << x))
            f[x] = 1.0;
    return f;
}

} // namespace ictmc
