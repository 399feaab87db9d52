#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nmwalk/cli.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::string u, alpha, delta;
    double j = 0, omega = 0, eps_a = 0, k = 0, t_max = 0, dt = 0;
    long long k_points = 0, n_levels = 0, m_cells = 0, workers = 0;
    bool displacement = false;
    std::string format, out;
};

void add_flags(CLI::App* sub, Flags& f, std::vector<std::pair<CLI::Option*, std::string>>& opts) {
    auto add = [&](CLI::Option* o, const std::string& key) { opts.emplace_back(o, key); };
    sub->add_option("--config", f.config_path, "JSON file with any of the keys below");
    add(sub->add_option("--u", f.u, "v'/v; number or start:stop:step (inclusive)"), "u");
    add(sub->add_option("--alpha", f.alpha, "spectral exponent; number or range"), "alpha");
    add(sub->add_option("--Delta", f.delta, "bandwidth in units of v; number or range (witness map)"), "Delta");
    add(sub->add_option("--J", f.j, "J_alpha v^(alpha+1)"), "J");
    add(sub->add_option("--omega", f.omega, "B-site detuning (chain-check)"), "omega");
    add(sub->add_option("--eps-A", f.eps_a, "A-site energy"), "eps_A");
    add(sub->add_option("--k", f.k, "quasi-momentum for single-k runs"), "k");
    add(sub->add_option("--k-points", f.k_points, "Brillouin-zone grid size"), "k_points");
    add(sub->add_option("--t-max", f.t_max, "final time in units of 1/v"), "t_max");
    add(sub->add_option("--dt", f.dt, "time step; dt * Delta must not exceed 0.2"), "dt");
    add(sub->add_option("--n-levels", f.n_levels, "discrete reservoir size"), "n_levels");
    add(sub->add_option("--m-cells", f.m_cells, "chain length (odd)"), "m_cells");
    add(sub->add_option("--workers", f.workers, "worker threads (0: NMWALK_WORKERS or all cores)"), "workers");
    add(sub->add_flag("--displacement", f.displacement, "evolve: emit <m(t)> over the zone"), "displacement");
    add(sub->add_option("--format", f.format, "csv or json"), "format");
    add(sub->add_option("--out", f.out, "output path, - for stdout"), "out");
}

nlohmann::json flag_value(const Flags& f, const std::string& key) {
    auto number_or_range = [](const std::string& s) -> nlohmann::json {
        if (s.find(':') != std::string::npos) return s;
        return nmwalk::cli::parse_range(s).front();
    };
    if (key == "u") return number_or_range(f.u);
    if (key == "alpha") return number_or_range(f.alpha);
    if (key == "Delta") return number_or_range(f.delta);
    if (key == "J") return f.j;
    if (key == "omega") return f.omega;
    if (key == "eps_A") return f.eps_a;
    if (key == "k") return f.k;
    if (key == "k_points") return f.k_points;
    if (key == "t_max") return f.t_max;
    if (key == "dt") return f.dt;
    if (key == "n_levels") return f.n_levels;
    if (key == "m_cells") return f.m_cells;
    if (key == "workers") return f.workers;
    if (key == "displacement") return f.displacement;
    if (key == "format") return f.format;
    return f.out;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = nmwalk::cli;
    CLI::App app{"nmwalk: non-Markovian dissipative quantum walk on an extended SSH lattice"};
    app.set_version_flag("--version", std::string(cli::version));
    app.require_subcommand(1);
    app.footer(
        "Ranges are start:stop:step with the stop value included. In phase-diagram mode a u grid\n"
        "that contains u = 1 is shifted by half a step. Exit codes: 0 ok, 2 config, 3 numeric\n"
        "budget, 4 degenerate parameters; errors are reported as one JSON object on stderr.");

    Flags flags;
    std::vector<std::pair<CLI::Option*, std::string>> options;
    const std::vector<std::pair<std::string, std::string>> descriptions{
        {"evolve", "2 pi rho_A(k, t), or <m(t)> with --displacement"},
        {"steady", "long-time 2 pi rho_Abar(k) over the zone"},
        {"phase-diagram", "long-time <m> over a (u, alpha) grid"},
        {"witness", "non-Markovianity witness sigma(t); a Delta range gives the map"},
        {"winding", "winding number of arg v(k)"},
        {"oracle-compare", "master equation vs exact evolution on a discrete reservoir"},
        {"chain-check", "finite chain <m(t)> vs the k-space formula"},
    };
    for (const auto& [name, text] : descriptions) add_flags(app.add_subcommand(name, text), flags, options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << cli::error_record("config", e.what()) << '\n';
        return 2;
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        nlohmann::json merged = cli::default_config();
        if (!flags.config_path.empty()) {
            std::ifstream in(flags.config_path);
            if (!in) throw nmwalk::ConfigError("cannot open config file " + flags.config_path);
            nlohmann::json file;
            try {
                file = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw nmwalk::ConfigError(std::string("config file: ") + e.what());
            }
            cli::merge_config(merged, file);
        }
        merged["command"] = sub->get_name();
        for (const auto& [opt, key] : options) {
            if (opt->count() > 0) merged[key] = flag_value(flags, key);
        }
        const auto config = cli::resolve(merged);
        const auto output = cli::run(config);
        if (config.out == "-") {
            cli::write_output(std::cout, config, output);
        } else {
            std::ofstream file(config.out, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open " + config.out + " for writing");
            cli::write_output(file, config, output);
            if (!file) throw std::runtime_error("write to " + config.out + " failed");
        }
        return 0;
    } catch (const nmwalk::Error& e) {
        std::cerr << cli::error_record(nmwalk::to_string(e.kind()), e.what()) << '\n';
        return cli::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << cli::error_record("io", e.what()) << '\n';
        return 1;
    }
}
