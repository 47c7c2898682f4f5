#pragma once

#include "ictmc/ergodicity.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ictmc {

/// One off-diagonal rate interval in a model file.
struct RateEntry {
    std::string from;
    std::string to;
    double low = 0.0;
    double high = 0.0;
};

/// Parsed "ictmc-v1" model file. Unspecified pairs default to [0, 0].
struct ModelFile {
    std::vector<std::string> states;
    std::vector<RateEntry> rates;
};

enum class QueryMethod { uniform, adaptive, uniform_ergodic, limit };

/// One query against a model. The gamble comes either as a label -> value
/// map or as an indicator of a label set; t is a finite horizon or
/// "infinity" (required by, and only valid for, the limit method).
struct QuerySpec {
    Gamble f;
    std::string f_description;
    double t = 0.0;
    bool t_infinity = false;
    double epsilon = 0.0;
    QueryMethod method = QueryMethod::uniform;
    std::uint64_t m = 1;
    bool track_bound = true;
    std::optional<double> delta_override; ///< limit running-bound strategy
    bool early_stop = false;
};

/// Result of one query, serializable with stable key order.
struct RunReport {
    QuerySpec query;
    Gamble result;
    std::optional<double> epsilon_prime;    ///< finite-horizon methods
    std::optional<double> guaranteed_error; ///< limit method
    std::uint64_t iterations = 0;
    bool stopped_early = false;
    bool converged = true;
    std::optional<double> true_error; ///< vs the closed form, two-state models
    double wall_seconds = 0.0;
};

/// Reads and validates a model file. Throws parse_error (bad JSON, with
/// line/column) or validation_error (format/interval violations, with the
/// offending entry).
IntervalRateOperator load_model(const std::string& path);

/// Same from an already-read document; `name` tags diagnostics.
IntervalRateOperator parse_model(const std::string& text, const std::string& name);

/// Serializes an operator back to the "ictmc-v1" format; load_model of the
/// output reproduces the operator exactly.
std::string serialize_model(const IntervalRateOperator& Q);

/// Parses a query given inline as JSON text or as a path to a JSON file
/// (anything whose first non-space byte is '{' counts as inline).
QuerySpec parse_query(const std::string& path_or_inline, const StateSpace& space);

/// Dispatches the query to the matching algorithm. The iteration cap for
/// limit queries honours the ICTMC_MAX_ITERS environment variable.
RunReport run_query(const IntervalRateOperator& model, const QuerySpec& query);

/// Deterministic JSON rendering of a report (wall_seconds excluded from
/// determinism guarantees).
std::string report_to_json(const RunReport& report, const StateSpace& space);

/// Single-row CSV rendering (with header) of a report.
std::string report_to_csv(const RunReport& report, const StateSpace& space);

/// JSON rendering of an ergodicity report for `check`.
std::string ergodicity_to_json(const IntervalRateOperator& Q);

/// Benchmark table for the five reference configurations on a two-state
/// model: method, N, mean durations without/with bound tracking over
/// `repeats` runs, eps' and true error (both x 10^3, 3 significant digits).
std::string reproduce_table(const IntervalRateOperator& model, int repeats);

} // namespace ictmc
