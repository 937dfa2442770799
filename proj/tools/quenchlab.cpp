// quenchlab: command-line driver for noisy transverse-field Ising ramps.
//
// Exit codes: 0 ok, 1 oracle-check failed, 2 invalid configuration,
// 3 numerical abort.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "quenchlab/config.hpp"
#include "quenchlab/error.hpp"
#include "quenchlab/parallel.hpp"
#include "quenchlab/runner.hpp"

using namespace quenchlab;

namespace {

void print_table(const CsvTable& t)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        std::cout << (i ? "  " : "") << t.columns[i];
    }
    std::cout << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::cout << (i ? "  " : "") << row[i];
        }
        std::cout << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    ExperimentConfig cfg;
    double hf = 0.0;
    std::string noise_alias;

    CLI::App app{"Transverse-field Ising chain ramps with dephasing noise"};
    app.set_config("--config", "", "key = value file; command-line flags override it");
    app.require_subcommand(1);

    app.add_option("--n", cfg.n_sites, "chain length N (even)")->capture_default_str();
    app.add_option("--hi", cfg.h_initial, "initial field h_i")->capture_default_str();
    auto* hf_opt = app.add_option("--hf", hf, "final field h_f (default 30, or 5 with --pair nn)");
    app.add_option("--pair", cfg.pair, "concurrence pair driving the h_f default: nn | nnn")
        ->capture_default_str();
    app.add_option("--tau", cfg.tau, "ramp time scale")->capture_default_str();
    app.add_option("--tau-grid", cfg.tau_grid, "geometric tau grid lo:hi:points-per-decade")
        ->capture_default_str();
    app.add_option("--xi", cfg.xi, "noise intensity")->capture_default_str();
    app.add_option("--xi-grid", cfg.xi_grid, "comma list or lo:hi:points-per-decade")
        ->capture_default_str();
    app.add_option("--noise", cfg.noise, "white | ou")->capture_default_str();
    app.add_option("--tau-n", cfg.tau_n, "Ornstein-Uhlenbeck correlation time")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "trajectory seed")->capture_default_str();
    app.add_option("--trajectories", cfg.trajectories, "trajectories per mode (ou noise)")
        ->capture_default_str();
    app.add_option("--trajectory-dt", cfg.trajectory_dt, "trajectory step (ou noise)")
        ->capture_default_str();
    app.add_option("--points", cfg.points, "field samples for static and --hf-scan")
        ->capture_default_str();
    app.add_option("--method", cfg.method, "integrator: magnus4 | cf4 | rk4")
        ->capture_default_str();
    app.add_option("--dt-max", cfg.integrator.dt_max, "largest step")->capture_default_str();
    app.add_option("--safety", cfg.integrator.safety, "step factor on sqrt(tau / E)")
        ->capture_default_str();
    app.add_option("--max-phase", cfg.integrator.max_phase, "largest phase per step")
        ->capture_default_str();
    app.add_option("--field-step", cfg.integrator.field_step, "step cap in units of tau")
        ->capture_default_str();
    app.add_option("--out", cfg.out, "output directory")->capture_default_str();
    app.add_option("--threads", cfg.threads, "workers (fallback QUENCHLAB_THREADS, then all cores)")
        ->capture_default_str();

    app.add_subcommand("static", "ground-state concurrences over h0 in [hi, hf]")->fallthrough();
    auto* quench = app.add_subcommand("quench", "one ramp, read out at h_f")->fallthrough();
    quench->add_flag("--hf-scan", cfg.hf_scan, "read out along the ramp at --points fields");
    app.add_subcommand("sweep-tau", "one ramp per tau on the grid")->fallthrough();
    app.add_subcommand("sweep-xi", "tau sweeps per xi with tau_c and log-law summary")
        ->fallthrough();
    app.add_subcommand("defects", "defect density over the tau grid, with tau_opt")
        ->fallthrough();
    auto* fit = app.add_subcommand("fit", "fit a CSV column pair")->fallthrough();
    fit->add_option("--input", cfg.input, "CSV written by this tool")->required();
    fit->add_option("--x", cfg.x_column, "x column")->capture_default_str();
    fit->add_option("--y", cfg.y_column, "y column")->capture_default_str();
    fit->add_option("--model", cfg.model, "power | log | linear")->capture_default_str();
    fit->add_option("--window-lo", cfg.fit_lo, "window start");
    fit->add_option("--window-hi", cfg.fit_hi, "window end");
    app.add_subcommand("oracle-check", "pipeline vs exact diagonalization (N <= 10)")
        ->fallthrough();
    app.add_subcommand("print-config", "print the effective configuration and exit")
        ->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto* sub = app.get_subcommands().front();
    cfg.kind = sub->get_name();
    if (hf_opt->count() > 0) {
        cfg.h_final = hf;
    }
    if (cfg.kind == "oracle-check" && app.get_option("--n")->count() == 0) {
        cfg.n_sites = 8;
    }

    if (cfg.kind == "print-config") {
        // unset options stay commented so the dump can be fed back via --config
        std::istringstream dump(app.config_to_str(true, false));
        for (std::string line; std::getline(dump, line);) {
            const bool unset = line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0;
            std::cout << (unset ? "# " : "") << line << '\n';
        }
        std::cout << "# resolved\n" << config_json(cfg).dump(2) << '\n';
        return 0;
    }

    try {
        const unsigned threads = resolve_threads(cfg.threads);
        const auto out = run(cfg, threads);
        if (cfg.kind == "oracle-check") {
            print_table(out.tables.at("oracle_check"));
            std::cout << (out.passed ? "PASS" : "FAIL") << " all deviations <= "
                      << oracle_tolerance << '\n';
            return out.passed ? 0 : 1;
        }
        if (cfg.kind == "fit") {
            std::cout << out.results["fit"].dump(2) << '\n';
        }
        std::cerr << "wrote " << manifest_path(cfg).string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    }
}
