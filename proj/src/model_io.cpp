#include "ictmc/model_io.hpp"

#include "ictmc/binary_oracle.hpp"
#include "ictmc/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <locale>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ictmc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatTag = "ictmc-v1";

std::string location_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return std::to_string(line) + ":" + std::to_string(column);
}

json parse_json(const std::string& text, const std::string& name) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(name + ":" + location_of(text, e.byte) + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw parse_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

double rate_value(const json& v, const std::string& where) {
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        const std::string text = v.get<std::string>();
        std::istringstream in(text);
        in.imbue(std::locale::classic());
        double value = 0.0;
        in >> value;
        if (in.fail() || !in.eof())
            throw validation_error(where + ": \"" + text +
                                   "\" is not a decimal rate");
        return value;
    }
    throw validation_error(where + ": rate must be a number or a decimal string");
}

std::ostringstream classic_stream() {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    return out;
}

std::string fmt_full(double v) {
    auto out = classic_stream();
    out << std::setprecision(17) << v;
    return out.str();
}

std::string fmt_sig3(double v) {
    auto out = classic_stream();
    out << std::setprecision(3) << v;
    return out.str();
}

std::string method_name(QueryMethod method) {
    switch (method) {
    case QueryMethod::uniform: return "uniform";
    case QueryMethod::adaptive: return "adaptive";
    case QueryMethod::uniform_ergodic: return "uniform-ergodic";
    case QueryMethod::limit: return "limit";
    }
    return "unknown";
}

std::uint64_t limit_iteration_cap() {
    const char* env = std::getenv("ICTMC_MAX_ITERS");
    if (env == nullptr || *env == '\0')
        return LimitOptions{}.max_iterations;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || value == 0)
        throw validation_error("ICTMC_MAX_ITERS must be a positive integer, got \"" +
                               std::string(env) + "\"");
    return value;
}

ordered_json gamble_by_label(const Gamble& g, const StateSpace& space) {
    ordered_json out = ordered_json::object();
    for (std::size_t x = 0; x < g.size(); ++x)
        out[space.label_of(x)] = g[x];
    return out;
}

} // namespace

IntervalRateOperator load_model(const std::string& path) {
    return parse_model(read_file(path), path);
}

IntervalRateOperator parse_model(const std::string& text, const std::string& name) {
    const json doc = parse_json(text, name);
    if (!doc.is_object())
        throw validation_error(name + ": model must be a JSON object");
    if (!doc.contains("format") || !doc["format"].is_string() ||
        doc["format"].get<std::string>() != kFormatTag)
        throw validation_error(name + ": missing or unsupported format tag (expected \"" +
                               kFormatTag + "\")");
    for (const auto& [key, value] : doc.items())
        if (key != "format" && key != "states" && key != "rates")
            throw validation_error(name + ": unknown key \"" + key + "\"");

    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty())
        throw validation_error(name + ": \"states\" must be a non-empty array of labels");
    std::vector<std::string> states;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& s : doc["states"]) {
        if (!s.is_string())
            throw validation_error(name + ": state labels must be strings");
        const std::string label = s.get<std::string>();
        if (!index.emplace(label, states.size()).second)
            throw validation_error(name + ": duplicate state label \"" + label + "\"");
        states.push_back(label);
    }

    const std::size_t n = states.size();
    std::vector<double> lower(n * n, 0.0);
    std::vector<double> upper(n * n, 0.0);
    std::unordered_set<std::size_t> given;
    if (doc.contains("rates")) {
        if (!doc["rates"].is_array())
            throw validation_error(name + ": \"rates\" must be an array");
        std::size_t i = 0;
        for (const auto& entry : doc["rates"]) {
            const std::string where = name + ": rates[" + std::to_string(i) + "]";
            ++i;
            if (!entry.is_object())
                throw validation_error(where + ": entry must be an object");
            for (const auto& [key, value] : entry.items())
                if (key != "from" && key != "to" && key != "low" && key != "high")
                    throw validation_error(where + ": unknown key \"" + key + "\"");
            if (!entry.contains("from") || !entry.contains("to") ||
                !entry.contains("low") || !entry.contains("high"))
                throw validation_error(where + ": needs from, to, low, high");
            if (!entry["from"].is_string() || !entry["to"].is_string())
                throw validation_error(where + ": from/to must be state labels");
            const std::string from = entry["from"].get<std::string>();
            const std::string to = entry["to"].get<std::string>();
            const auto from_it = index.find(from);
            const auto to_it = index.find(to);
            if (from_it == index.end())
                throw validation_error(where + ": unknown state \"" + from + "\"");
            if (to_it == index.end())
                throw validation_error(where + ": unknown state \"" + to + "\"");
            if (from_it->second == to_it->second)
                throw validation_error(where + ": from and to must differ");
            const double low = rate_value(entry["low"], where + ".low");
            const double high = rate_value(entry["high"], where + ".high");
            if (!std::isfinite(low) || !std::isfinite(high))
                throw validation_error(where + ": rates must be finite");
            if (low < 0.0)
                throw validation_error(where + ": low must be >= 0");
            if (low > high)
                throw validation_error(where + ": interval is inverted (low > high)");
            const std::size_t cell = from_it->second * n + to_it->second;
            if (!given.insert(cell).second)
                throw validation_error(where + ": pair " + from + " -> " + to +
                                       " given twice");
            lower[cell] = low;
            upper[cell] = high;
        }
    }

    return IntervalRateOperator(StateSpace{n, std::move(states)},
                                std::move(lower), std::move(upper));
}

std::string serialize_model(const IntervalRateOperator& Q) {
    ordered_json doc;
    doc["format"] = kFormatTag;
    ordered_json states = ordered_json::array();
    for (std::size_t x = 0; x < Q.size(); ++x)
        states.push_back(Q.space().label_of(x));
    doc["states"] = states;
    ordered_json rates = ordered_json::array();
    for (std::size_t x = 0; x < Q.size(); ++x)
        for (std::size_t y = 0; y < Q.size(); ++y) {
            if (x == y || (Q.lower(x, y) == 0.0 && Q.upper(x, y) == 0.0))
                continue;
            ordered_json entry;
            entry["from"] = Q.space().label_of(x);
            entry["to"] = Q.space().label_of(y);
            entry["low"] = Q.lower(x, y);
            entry["high"] = Q.upper(x, y);
            rates.push_back(entry);
        }
    doc["rates"] = rates;
    return doc.dump(2) + "\n";
}

QuerySpec parse_query(const std::string& path_or_inline, const StateSpace& space) {
    const auto first = path_or_inline.find_first_not_of(" \t\r\n");
    std::string text, name;
    if (first != std::string::npos && path_or_inline[first] == '{') {
        text = path_or_inline;
        name = "query";
    } else {
        name = path_or_inline;
        text = read_file(path_or_inline);
    }
    const json doc = parse_json(text, name);
    if (!doc.is_object())
        throw validation_error(name + ": query must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (key != "f" && key != "t" && key != "epsilon" && key != "method" &&
            key != "m" && key != "track_bound" && key != "delta_override" &&
            key != "early_stop")
            throw validation_error(name + ": unknown key \"" + key + "\"");

    QuerySpec q;

    if (!doc.contains("f") || !doc["f"].is_object())
        throw validation_error(name + ": \"f\" must be an object (label map or "
                               "{\"indicator\": [labels]})");
    const json& f = doc["f"];
    q.f.assign(space.size, 0.0);
    if (f.size() == 1 && f.contains("indicator") && f["indicator"].is_array()) {
        std::ostringstream desc;
        desc << "indicator{";
        bool first_label = true;
        for (const auto& s : f["indicator"]) {
            if (!s.is_string())
                throw validation_error(name + ": indicator entries must be labels");
            const auto idx = space.index_of(s.get<std::string>());
            if (!idx)
                throw validation_error(name + ": unknown state \"" +
                                       s.get<std::string>() + "\" in indicator");
            q.f[*idx] = 1.0;
            desc << (first_label ? "" : ",") << s.get<std::string>();
            first_label = false;
        }
        desc << "}";
        q.f_description = desc.str();
    } else {
        for (const auto& [label, value] : f.items()) {
            const auto idx = space.index_of(label);
            if (!idx)
                throw validation_error(name + ": unknown state \"" + label +
                                       "\" in gamble");
            if (!value.is_number())
                throw validation_error(name + ": gamble value for \"" + label +
                                       "\" must be a number");
            q.f[*idx] = value.get<double>();
        }
        q.f_description = "map";
    }
    validate_gamble(q.f, space.size);

    if (!doc.contains("t"))
        throw validation_error(name + ": missing \"t\"");
    if (doc["t"].is_string()) {
        if (doc["t"].get<std::string>() != "infinity")
            throw validation_error(name + ": \"t\" must be a number or \"infinity\"");
        q.t_infinity = true;
    } else if (doc["t"].is_number()) {
        q.t = doc["t"].get<double>();
        if (!std::isfinite(q.t) || q.t < 0.0)
            throw validation_error(name + ": \"t\" must be finite and >= 0");
    } else {
        throw validation_error(name + ": \"t\" must be a number or \"infinity\"");
    }

    if (!doc.contains("epsilon") || !doc["epsilon"].is_number())
        throw validation_error(name + ": missing numeric \"epsilon\"");
    q.epsilon = doc["epsilon"].get<double>();
    if (!std::isfinite(q.epsilon) || !(q.epsilon > 0.0))
        throw validation_error(name + ": \"epsilon\" must be finite and > 0");

    if (!doc.contains("method") || !doc["method"].is_string())
        throw validation_error(name + ": missing \"method\"");
    const std::string method = doc["method"].get<std::string>();
    if (method == "uniform")
        q.method = QueryMethod::uniform;
    else if (method == "adaptive")
        q.method = QueryMethod::adaptive;
    else if (method == "uniform-ergodic")
        q.method = QueryMethod::uniform_ergodic;
    else if (method == "limit")
        q.method = QueryMethod::limit;
    else
        throw validation_error(name + ": unknown method \"" + method + "\"");

    if (doc.contains("m")) {
        if (!doc["m"].is_number_unsigned() || doc["m"].get<std::uint64_t>() == 0)
            throw validation_error(name + ": \"m\" must be a positive integer");
        q.m = doc["m"].get<std::uint64_t>();
    }
    if (doc.contains("track_bound")) {
        if (!doc["track_bound"].is_boolean())
            throw validation_error(name + ": \"track_bound\" must be a boolean");
        q.track_bound = doc["track_bound"].get<bool>();
    }
    if (doc.contains("early_stop")) {
        if (!doc["early_stop"].is_boolean())
            throw validation_error(name + ": \"early_stop\" must be a boolean");
        q.early_stop = doc["early_stop"].get<bool>();
    }
    if (doc.contains("delta_override")) {
        if (!doc["delta_override"].is_number())
            throw validation_error(name + ": \"delta_override\" must be a number");
        q.delta_override = doc["delta_override"].get<double>();
        if (!std::isfinite(*q.delta_override) || !(*q.delta_override > 0.0))
            throw validation_error(name + ": \"delta_override\" must be > 0");
    }

    if (q.method == QueryMethod::limit && !q.t_infinity)
        throw validation_error(name + ": method \"limit\" requires t = \"infinity\"");
    if (q.method != QueryMethod::limit && q.t_infinity)
        throw validation_error(name + ": t = \"infinity\" requires method \"limit\"");
    if (q.delta_override && q.method != QueryMethod::limit)
        throw validation_error(name + ": \"delta_override\" only applies to method "
                               "\"limit\"");
    return q;
}

RunReport run_query(const IntervalRateOperator& model, const QuerySpec& query) {
    RunReport report;
    report.query = query;

    const auto start = std::chrono::steady_clock::now();
    const ApproxOptions options{query.track_bound, false, query.early_stop};

    switch (query.method) {
    case QueryMethod::uniform:
    case QueryMethod::adaptive:
    case QueryMethod::uniform_ergodic: {
        ApproxTrace trace;
        if (query.method == QueryMethod::uniform) {
            trace = uniform_approximate(model, query.f, query.t, query.epsilon, options);
        } else if (query.method == QueryMethod::adaptive) {
            trace = adaptive_approximate(model, query.f, query.t, query.epsilon,
                                         query.m, options);
        } else {
            const UniformPlan plan =
                uniform_ergodic_plan(model, query.f, query.t, query.epsilon, query.m);
            trace = run_uniform_plan(model, query.f, plan, options);
        }
        report.result = trace.result;
        report.epsilon_prime = trace.epsilon_prime;
        report.iterations = trace.total_iterations;
        report.stopped_early = trace.stopped_early;
        if (auto binary = BinaryModel::from_operator(model)) {
            const Gamble exact = analytic_transient(*binary, query.f, query.t);
            double err = 0.0;
            for (std::size_t x = 0; x < exact.size(); ++x)
                err = std::max(err, std::fabs(exact[x] - trace.result[x]));
            report.true_error = err;
        }
        break;
    }
    case QueryMethod::limit: {
        LimitOptions limit_options;
        limit_options.max_iterations = limit_iteration_cap();
        LimitStrategy strategy;
        if (query.delta_override)
            strategy = RunningBound{*query.delta_override};
        else
            strategy = AprioriDelta{query.m};
        const LimitResult value =
            limit_approximate(model, query.f, query.epsilon, strategy, limit_options);
        report.result.assign(model.size(), value.value);
        report.guaranteed_error = value.guaranteed_error;
        report.iterations = value.iterations;
        report.converged = value.converged;
        if (auto binary = BinaryModel::from_operator(model)) {
            try {
                report.true_error = std::fabs(analytic_limit(*binary, query.f) -
                                              value.value);
            } catch (const inapplicable_error&) {
                // no constant limit on this ordering: nothing to report
            }
        }
        break;
    }
    }

    const auto end = std::chrono::steady_clock::now();
    report.wall_seconds = std::chrono::duration<double>(end - start).count();
    return report;
}

namespace {

ordered_json report_parameters(const RunReport& report) {
    const QuerySpec& q = report.query;
    ordered_json params;
    if (q.t_infinity)
        params["t"] = "infinity";
    else
        params["t"] = q.t;
    params["epsilon"] = q.epsilon;
    params["m"] = q.m;
    params["track_bound"] = q.track_bound;
    if (q.delta_override)
        params["delta_override"] = *q.delta_override;
    params["early_stop"] = q.early_stop;
    return params;
}

} // namespace

std::string report_to_json(const RunReport& report, const StateSpace& space) {
    ordered_json doc;
    doc["method"] = method_name(report.query.method);
    doc["parameters"] = report_parameters(report);
    doc["f"] = gamble_by_label(report.query.f, space);
    doc["result"] = gamble_by_label(report.result, space);
    if (report.epsilon_prime)
        doc["epsilon_prime"] = *report.epsilon_prime;
    if (report.guaranteed_error) {
        doc["guaranteed_error"] = *report.guaranteed_error;
        doc["value"] = report.result.empty() ? 0.0 : report.result[0];
    }
    doc["iterations"] = report.iterations;
    doc["converged"] = report.converged;
    doc["stopped_early"] = report.stopped_early;
    if (report.true_error)
        doc["true_error"] = *report.true_error;
    doc["wall_seconds"] = report.wall_seconds;
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& report, const StateSpace& space) {
    auto header = classic_stream();
    auto row = classic_stream();
    header << "method,t,epsilon,m,track_bound,early_stop,delta_override,iterations,"
              "epsilon_prime,guaranteed_error,converged,stopped_early,true_error,"
              "wall_seconds";
    const QuerySpec& q = report.query;
    row << method_name(q.method) << ','
        << (q.t_infinity ? std::string("infinity") : fmt_full(q.t)) << ','
        << fmt_full(q.epsilon) << ',' << q.m << ',' << (q.track_bound ? 1 : 0) << ','
        << (q.early_stop ? 1 : 0) << ','
        << (q.delta_override ? fmt_full(*q.delta_override) : std::string()) << ','
        << report.iterations << ','
        << (report.epsilon_prime ? fmt_full(*report.epsilon_prime) : std::string())
        << ','
        << (report.guaranteed_error ? fmt_full(*report.guaranteed_error)
                                    : std::string())
        << ',' << (report.converged ? 1 : 0) << ',' << (report.stopped_early ? 1 : 0)
        << ',' << (report.true_error ? fmt_full(*report.true_error) : std::string())
        << ',' << fmt_full(report.wall_seconds);
    for (std::size_t x = 0; x < report.result.size(); ++x) {
        header << ",result_" << space.label_of(x);
        row << ',' << fmt_full(report.result[x]);
    }
    return header.str() + "\n" + row.str() + "\n";
}

std::string ergodicity_to_json(const IntervalRateOperator& Q) {
    const ErgodicityReport report = check_ergodic(Q);
    ordered_json doc;
    doc["states"] = Q.size();
    doc["operator_norm"] = operator_norm(Q);
    ordered_json top = ordered_json::array();
    for (std::size_t x : report.top_class)
        top.push_back(Q.space().label_of(x));
    doc["top_class"] = top;
    doc["regular"] = report.regular;
    doc["absorbing"] = report.absorbing;
    doc["ergodic"] = report.ergodic;
    return doc.dump(2) + "\n";
}

std::string reproduce_table(const IntervalRateOperator& model, int repeats) {
    if (model.size() != 2)
        throw inapplicable_error("the benchmark table needs a two-state model");
    if (repeats < 1)
        throw validation_error("repeats must be >= 1");
    const BinaryModel binary = *BinaryModel::from_operator(model);
    const Gamble f{0.0, 1.0};
    const double t = 1.0;
    const Gamble exact = analytic_transient(binary, f, t);

    struct Config {
        const char* name;
        QueryMethod method;
        double epsilon;
        std::uint64_t m;
    };
    const Config configs[] = {
        {"uniform", QueryMethod::uniform, 1e-3, 1},
        {"uniform-coarse", QueryMethod::uniform, 3.2e-2, 1},
        {"adaptive-m1", QueryMethod::adaptive, 1e-3, 1},
        {"adaptive-m20", QueryMethod::adaptive, 1e-3, 20},
        {"uniform-ergodic", QueryMethod::uniform_ergodic, 1e-3, 1},
    };

    auto out = classic_stream();
    out << "method,N,D_eps_ms,D_eps_prime_ms,eps_prime_x1e3,eps_a_x1e3\n";
    for (const Config& config : configs) {
        const auto run_once = [&](bool track) {
            const ApproxOptions options{track, false, false};
            if (config.method == QueryMethod::uniform)
                return uniform_approximate(model, f, t, config.epsilon, options);
            if (config.method == QueryMethod::adaptive)
                return adaptive_approximate(model, f, t, config.epsilon, config.m,
                                            options);
            const UniformPlan plan =
                uniform_ergodic_plan(model, f, t, config.epsilon, config.m);
            return run_uniform_plan(model, f, plan, options);
        };

        const auto timed = [&](bool track, ApproxTrace& last) {
            const auto begin = std::chrono::steady_clock::now();
            for (int r = 0; r < repeats; ++r)
                last = run_once(track);
            const auto finish = std::chrono::steady_clock::now();
            return std::chrono::duration<double, std::milli>(finish - begin).count() /
                   repeats;
        };

        ApproxTrace plain, tracked;
        const double d_eps = timed(false, plain);
        const double d_eps_prime = timed(true, tracked);
        double err = 0.0;
        for (std::size_t x = 0; x < exact.size(); ++x)
            err = std::max(err, std::fabs(exact[x] - tracked.result[x]));
        out << config.name << ',' << tracked.total_iterations << ','
            << fmt_sig3(d_eps) << ',' << fmt_sig3(d_eps_prime) << ','
            << fmt_sig3(tracked.epsilon_prime * 1e3) << ',' << fmt_sig3(err * 1e3)
            << '\n';
    }
    return out.str();
}

} // namespace ictmc
