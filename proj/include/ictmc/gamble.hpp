#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ictmc {

/// Finite state space, optionally labelled. Labels, when present, are
/// distinct and there is exactly one per state.
struct StateSpace {
    std::size_t size = 0;
    std::vector<std::string> labels;

    /// Throws validation_error on an empty space or bad labels.
    void validate() const;

    /// Label of state x, or its decimal index when the space is unlabelled.
    std::string label_of(std::size_t x) const;

    /// Index of a label, if the space is labelled and the label exists.
    std::optional<std::size_t> index_of(std::string_view label) const;
};

/// Real-valued function on the state space, indexed by state.
using Gamble = std::vector<double>;

struct GambleNorms {
    double max_norm = 0.0;  ///< max_x |f(x)|
    double variation = 0.0; ///< max f - min f
    double centred = 0.0;   ///< variation / 2
};

/// All three norms in one pass. Requires a non-empty gamble.
GambleNorms gamble_norms(const Gamble& f);

/// max f - min f in one pass; the quantity grid error bounds consume.
double variation_norm(const Gamble& f);

/// Half the variation norm.
double centred_norm(const Gamble& f);

/// Throws validation_error unless f has `size` finite entries.
void validate_gamble(const Gamble& f, std::size_t size);

/// Indicator gamble of a set of states.
Gamble indicator(std::size_t size, const std::vector<std::size_t>& states);

/// Indicator gamble of a subset given as a bitmask over states 0..size-1.
Gamble indicator_mask(std::size_t size, unsigned long long mask);

} // namespace ictmc
