// cli.hpp: run configuration and the command implementations behind the nmwalk tool.
//
// A configuration is resolved in three layers, defaults < --config file < flags, into
// one JSON object. That object is echoed verbatim into every output, so a file carries
// everything needed to reproduce it.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "gme.hpp"
#include "kernel.hpp"
#include "model.hpp"
#include "observables.hpp"
#include "oracle.hpp"
#include "swt.hpp"
#include "table.hpp"

namespace nmwalk::cli {

inline constexpr const char* version = "0.1.0";

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"evolve",  "steady",         "phase-diagram", "witness",
                                                "winding", "oracle-compare", "chain-check"};
    return names;
}

inline nlohmann::json default_config() {
    return {
        {"u", 2.0},          {"alpha", 0.0},     {"J", 0.01},          {"Delta", 5.0},
        {"omega", 10.0},     {"eps_A", 0.0},     {"k", 0.0},           {"k_points", 129},
        {"t_max", 100.0},    {"dt", 0.02},       {"n_levels", 400},    {"m_cells", 41},
        {"workers", 0},      {"displacement", false}, {"format", nullptr}, {"out", "-"},
    };
}

// start:stop:step, both ends included when stop lies on the grid. Values are rounded
// to the decimal precision of the inputs so 0.05 * 3 prints as 0.15.
inline std::vector<double> parse_range(const std::string& text) {
    const auto first = text.find(':');
    if (first == std::string::npos) {
        try {
            std::size_t used = 0;
            const double value = std::stod(text, &used);
            if (used != text.size()) throw ConfigError("");
            return {value};
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number or range '" + text + "'");
        }
    }
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos || text.find(':', second + 1) != std::string::npos) {
        throw ConfigError("range must read start:stop:step, got '" + text + "'");
    }
    const std::string parts[3] = {text.substr(0, first), text.substr(first + 1, second - first - 1),
                                  text.substr(second + 1)};
    double values[3] = {};
    int decimals = 0;
    for (int i = 0; i < 3; ++i) {
        try {
            std::size_t used = 0;
            values[i] = std::stod(parts[i], &used);
            if (used != parts[i].size()) throw ConfigError("");
        } catch (const std::exception&) {
            throw ConfigError("cannot parse range component '" + parts[i] + "' in '" + text + "'");
        }
        if (const auto dot = parts[i].find('.'); dot != std::string::npos) {
            decimals = std::max(decimals, static_cast<int>(parts[i].size() - dot - 1));
        }
    }
    const double start = values[0];
    const double stop = values[1];
    const double step = values[2];
    if (!(step > 0.0) || stop < start) throw ConfigError("range '" + text + "' needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1000000) throw ConfigError("range '" + text + "' has too many points");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.*f", std::min(decimals + 2, 15),
                      start + static_cast<double>(i) * step);
        out[i] = std::stod(buffer);
    }
    return out;
}

inline std::vector<double> values_of(const nlohmann::json& value, const std::string& key) {
    if (value.is_number()) return {value.get<double>()};
    if (value.is_string()) return parse_range(value.get<std::string>());
    throw ConfigError("'" + key + "' must be a number or a start:stop:step string");
}

// Shift the whole grid by half a step if it touches u = 1.
inline std::vector<double> avoid_transition(std::vector<double> u) {
    bool touches = false;
    for (double x : u) touches = touches || std::abs(x - 1.0) < 1e-12;
    if (!touches) return u;
    const double step = u.size() > 1 ? u[1] - u[0] : 0.1;
    for (double& x : u) x += 0.5 * step;
    return u;
}

struct RunConfig {
    std::string command;
    nlohmann::json resolved;

    std::vector<double> u;
    std::vector<double> alpha;
    std::vector<double> delta;
    double j_alpha{0.01};
    double omega{10.0};
    double eps_A{0.0};
    double k{0.0};
    std::size_t k_points{129};
    double t_max{100.0};
    double dt{0.02};
    std::size_t n_levels{400};
    std::size_t m_cells{41};
    std::size_t workers{0};
    bool displacement{false};
    std::string format{"csv"};
    std::string out{"-"};

    double scalar(const std::vector<double>& values, const char* name) const {
        if (values.size() != 1) throw ConfigError(std::string("'") + name + "' must be a single value for " + command);
        return values.front();
    }

    WalkParams params(double u_value) const {
        WalkParams p;
        p.u = u_value;
        p.omega = omega;
        p.eps_A = eps_A;
        p.validate();
        return p;
    }

    SpectralLaw law(double alpha_value, double delta_value) const {
        SpectralLaw l{alpha_value, j_alpha, delta_value};
        l.validate();
        return l;
    }

    TimeGrid time_grid() const { return TimeGrid::uniform(t_max, dt); }
};

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

inline std::size_t get_count(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

// Merge a JSON document into the defaults; unknown keys are rejected.
inline void merge_config(nlohmann::json& into, const nlohmann::json& layer) {
    if (!layer.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : layer.items()) {
        if (key == "command") {
            into[key] = value;
            continue;
        }
        if (!into.contains(key)) throw ConfigError("unknown config key '" + key + "'");
        into[key] = value;
    }
}

inline RunConfig resolve(const nlohmann::json& merged) {
    RunConfig c;
    c.resolved = merged;
    if (!merged.contains("command") || !merged["command"].is_string()) throw ConfigError("no command given");
    c.command = merged["command"].get<std::string>();
    bool known = false;
    for (const auto& name : commands()) known = known || name == c.command;
    if (!known) throw ConfigError("unknown command '" + c.command + "'");

    c.u = values_of(merged.at("u"), "u");
    c.alpha = values_of(merged.at("alpha"), "alpha");
    c.delta = values_of(merged.at("Delta"), "Delta");
    c.j_alpha = get_as<double>(merged, "J");
    c.omega = get_as<double>(merged, "omega");
    c.eps_A = get_as<double>(merged, "eps_A");
    c.k = get_as<double>(merged, "k");
    c.k_points = get_count(merged, "k_points");
    c.t_max = get_as<double>(merged, "t_max");
    c.dt = get_as<double>(merged, "dt");
    c.n_levels = get_count(merged, "n_levels");
    c.m_cells = get_count(merged, "m_cells");
    c.workers = get_count(merged, "workers");
    c.displacement = get_as<bool>(merged, "displacement");
    c.out = get_as<std::string>(merged, "out");
    if (merged.at("format").is_null()) {
        c.format = c.command == "winding" ? "json" : "csv";
    } else {
        c.format = get_as<std::string>(merged, "format");
    }
    c.resolved["format"] = c.format;
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");

    if (c.command == "phase-diagram") {
        c.u = avoid_transition(c.u);
        c.resolved["u_values"] = c.u;
    }
    if (!(c.j_alpha >= 0.0)) throw ConfigError("J must be >= 0");
    for (double d : c.delta) {
        if (!(d > 0.0)) throw ConfigError("Delta must be > 0");
    }
    for (double a : c.alpha) {
        if (!(a >= 0.0)) throw ConfigError("alpha must be >= 0");
    }
    for (double x : c.u) {
        if (!(x >= 0.0)) throw ConfigError("u must be >= 0");
    }
    if (!(c.dt > 0.0) || !(c.t_max > 0.0)) throw ConfigError("dt and t_max must be positive");
    const bool time_domain = c.command == "evolve" || c.command == "witness" || c.command == "oracle-compare";
    if (time_domain) {
        double delta_max = 0.0;
        for (double d : c.delta) delta_max = std::max(delta_max, d);
        if (c.dt * delta_max > max_step_times_bandwidth * (1.0 + 1e-12)) {
            throw ConfigError("dt * Delta = " + std::to_string(c.dt * delta_max) + " exceeds 0.2");
        }
    }
    if (c.k_points < 2) throw ConfigError("k_points must be >= 2");
    return c;
}

struct Output {
    Table table;
    nlohmann::json meta;
    nlohmann::json extra = nlohmann::json::object();  // command-specific scalar results
};

inline nlohmann::json meta_for(const RunConfig& c) {
    nlohmann::json meta = c.resolved;
    meta["version"] = version;
    meta["seed_free"] = true;
    return meta;
}

inline Output run_evolve(const RunConfig& c) {
    const double u = c.scalar(c.u, "u");
    const auto law = c.law(c.scalar(c.alpha, "alpha"), c.scalar(c.delta, "Delta"));
    const auto params = c.params(u);
    const auto grid = c.time_grid();
    Output out;
    if (c.displacement) {
        if (params.degenerate()) throw DegenerateError("mean displacement undefined at u = 1");
        const KGrid kgrid(c.k_points);
        const auto traces = evolve_zone(params, law, kgrid, grid, c.workers);
        const auto m = mean_displacement_series(traces, params, kgrid);
        out.table.columns = {"t", "mean_m"};
        for (std::size_t n = 0; n < grid.count; ++n) out.table.add({grid.at(n), m[n]});
    } else {
        const auto trace = evolve_volterra(law, hopping_modulus_squared(params, c.k), grid, c.k);
        out.table.columns = {"t", "two_pi_rho_A"};
        for (std::size_t n = 0; n < grid.count; ++n) out.table.add({grid.at(n), trace.population[n]});
        out.extra["bounds_flag"] = trace.bounds_flag;
    }
    return out;
}

inline Output run_steady(const RunConfig& c) {
    const auto params = c.params(c.scalar(c.u, "u"));
    const auto law = c.law(c.scalar(c.alpha, "alpha"), c.scalar(c.delta, "Delta"));
    const KGrid kgrid(c.k_points);
    Output out;
    out.table.columns = {"k", "two_pi_rho_A_bar"};
    for (double k : kgrid.points) {
        out.table.add({k, 1.0 - two_pi * steady_average(law, hopping_modulus_squared(params, k))});
    }
    if (!params.degenerate()) out.extra["mean_displacement"] = mean_displacement_longtime(params, law, kgrid);
    return out;
}

inline Output run_phase_diagram(const RunConfig& c) {
    const SpectralLaw law_template{0.0, c.j_alpha, c.scalar(c.delta, "Delta")};
    law_template.validate();
    const KGrid kgrid(c.k_points);
    const auto cells = phase_diagram(c.u, c.alpha, law_template, kgrid, c.workers);
    Output out;
    out.table.columns = {"u", "alpha", "mean_displacement"};
    for (const auto& cell : cells) out.table.add({cell.u, cell.alpha, cell.mean_displacement});
    return out;
}

inline Output run_witness(const RunConfig& c) {
    const auto params = c.params(c.scalar(c.u, "u"));
    const double alpha = c.scalar(c.alpha, "alpha");
    const auto grid = c.time_grid();
    const KGrid kgrid(c.k_points);
    const auto times = grid.points();
    Output out;
    const bool map = c.delta.size() > 1;
    out.table.columns = map ? std::vector<std::string>{"Delta", "t", "sigma"} : std::vector<std::string>{"t", "sigma"};
    nlohmann::json n_lower = nlohmann::json::array();
    for (double delta : c.delta) {
        const auto traces = evolve_zone(params, c.law(alpha, delta), kgrid, grid, c.workers);
        const auto w = witness(survival_series(traces, kgrid), times);
        for (std::size_t n = 0; n < grid.count; ++n) {
            if (map) {
                out.table.add({delta, times[n], w.sigma[n]});
            } else {
                out.table.add({times[n], w.sigma[n]});
            }
        }
        n_lower.push_back(w.n_lower);
    }
    out.extra["n_lower"] = map ? n_lower : n_lower.front();
    return out;
}

inline Output run_winding(const RunConfig& c) {
    Output out;
    out.table.columns = {"u", "winding"};
    for (double u : c.u) out.table.add({u, static_cast<double>(winding_number(c.params(u)))});
    if (c.u.size() == 1) out.extra["winding"] = static_cast<int>(out.table.rows.front()[1]);
    return out;
}

// Born master equation with the discrete kernel against exact evolution of the same
// finite reduced model.
inline Output run_oracle_compare(const RunConfig& c) {
    const auto params = c.params(c.scalar(c.u, "u"));
    const auto law = c.law(c.scalar(c.alpha, "alpha"), c.scalar(c.delta, "Delta"));
    const auto reservoir = discretize_spectral_law(law, c.n_levels);
    const double vk2 = hopping_modulus_squared(params, c.k);
    const auto grid = c.time_grid();
    const auto gme = evolve_volterra(reservoir, vk2, grid, c.k);
    const auto exact = oracle::exact_evolve_reduced(reduced_from_reservoir(reservoir), params, c.k, gme.times);
    Output out;
    out.table.columns = {"t", "gme", "exact", "abs_err"};
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.count; ++n) {
        const double err = std::abs(gme.population[n] - exact.population[n]);
        worst = std::max(worst, err);
        out.table.add({gme.times[n], gme.population[n], exact.population[n], err});
    }
    out.extra["max_abs_err"] = worst;
    out.extra["recurrence_time"] = two_pi * static_cast<double>(c.n_levels) / law.delta;
    return out;
}

// Real-space chain against the k-space displacement formula on the same reservoir.
inline Output run_chain_check(const RunConfig& c) {
    const auto params = c.params(c.scalar(c.u, "u"));
    if (params.degenerate()) throw DegenerateError("mean displacement undefined at u = 1");
    const auto law = c.law(c.scalar(c.alpha, "alpha"), c.scalar(c.delta, "Delta"));
    const auto raw = raw_reservoir(discretize_spectral_law(law, c.n_levels), params);
    const auto times = c.time_grid().points();
    const auto chain = oracle::exact_evolve_chain(oracle::ChainModel{c.m_cells, params, raw}, times);
    const KGrid kgrid(c.k_points);
    const auto traces = parallel_map<KTrace>(kgrid.n, c.workers, [&](std::size_t i) {
        return oracle::exact_evolve_full(params, raw, kgrid.points[i], times);
    });
    Output out;
    out.table.columns = {"t", "chain_mean_m", "kspace_mean_m", "abs_err"};
    for (std::size_t n = 0; n < times.size(); ++n) {
        const double kspace = mean_displacement(traces, params, kgrid, n);
        out.table.add({times[n], chain.mean_m[n], kspace, std::abs(chain.mean_m[n] - kspace)});
    }
    return out;
}

inline Output run(const RunConfig& c) {
    Output out;
    if (c.command == "evolve") out = run_evolve(c);
    else if (c.command == "steady") out = run_steady(c);
    else if (c.command == "phase-diagram") out = run_phase_diagram(c);
    else if (c.command == "witness") out = run_witness(c);
    else if (c.command == "winding") out = run_winding(c);
    else if (c.command == "oracle-compare") out = run_oracle_compare(c);
    else if (c.command == "chain-check") out = run_chain_check(c);
    else throw ConfigError("unknown command '" + c.command + "'");
    out.meta = meta_for(c);
    for (const auto& [key, value] : out.extra.items()) out.meta["result_" + key] = value;
    return out;
}

// The winding command's JSON form is a flat object with "winding" next to "meta".
inline void write_output(std::ostream& stream, const RunConfig& c, const Output& out) {
    if (c.format == "csv") {
        write_csv(stream, out.table, out.meta);
        return;
    }
    nlohmann::json doc = table_json(out.table, out.meta);
    for (const auto& [key, value] : out.extra.items()) doc[key] = value;
    stream << doc.dump(1) << '\n';
}

inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return 2;
        case ErrorKind::budget: return 3;
        case ErrorKind::degenerate: return 4;
    }
    return 1;
}

inline std::string error_record(const std::string& kind, const std::string& message) {
    return nlohmann::json{{"error", kind}, {"message", message}}.dump();
}

}  // namespace nmwalk::cli
