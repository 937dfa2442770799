#pragma once

// run(config): computes one experiment and writes its CSV files plus a JSON
// manifest into the output directory.  Rows come back from the workers in
// input order, so the CSV bytes do not depend on the worker count.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quenchlab/config.hpp"
#include "quenchlab/experiments.hpp"
#include "quenchlab/io.hpp"
#include "quenchlab/observables.hpp"
#include "quenchlab/oracle.hpp"
#include "quenchlab/parallel.hpp"
#include "quenchlab/scaling.hpp"
#include "quenchlab/trajectory.hpp"

namespace quenchlab {

inline constexpr double oracle_tolerance = 1e-6;

struct RunOutput {
    std::map<std::string, CsvTable> tables;  // file stem -> table
    nlohmann::json results = nlohmann::json::object();
    int clamp_count = 0;
    bool passed = true;  // oracle-check verdict
};

namespace detail {

inline RampSetup ramp_setup(const ExperimentConfig& c, double xi)
{
    RampSetup s;
    s.n_sites = c.n_sites;
    s.h_initial = c.h_initial;
    s.h_final = c.resolved_h_final();
    s.noise = noise_spec(c, xi);
    s.params = integrator_params(c);
    return s;
}

inline double json_number(double v)
{
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
}

inline RunOutput run_static(const ExperimentConfig& c)
{
    RunOutput out;
    auto& t = out.tables["static"];
    t.columns = {"h0", "sz", "C_nn", "C_nnn"};
    for (const auto& r : static_curve(c.n_sites, linear_grid(c.h_initial, c.resolved_h_final(),
                                                             c.points))) {
        t.add({r.h0, r.sz, r.c_nn, r.c_nnn});
    }
    return out;
}

// Mode-by-mode trajectory average at the end of the ramp.  All modes share
// the seed: the field noise is one global realization.
inline ModeSnapshot trajectory_snapshot(const ExperimentConfig& c, unsigned threads)
{
    const auto grid = build_grid(c.n_sites);
    const auto p = ramp_setup(c, c.xi).protocol(c.tau);
    const auto noise = noise_spec(c, c.xi);
    const TrajectoryOptions opts{c.trajectories, c.trajectory_dt, c.seed};
    const auto states = parallel_map<ModeState>(grid.size(), threads, [&](std::size_t i) {
        return trajectory_oracle(grid.momenta[i], p, noise, p.end_time(), opts, 1);
    });
    ModeSnapshot snap;
    snap.n_sites = c.n_sites;
    snap.t = p.end_time();
    snap.h0 = p.h_final;
    for (const auto& s : states) {
        auto d = to_diagonal_basis(s, snap.h0);
        clamp_populations(d, snap.clamp_count);
        snap.modes.push_back(d);
    }
    return snap;
}

inline RunOutput run_quench(const ExperimentConfig& c, unsigned threads)
{
    RunOutput out;
    auto& t = out.tables["quench"];
    const auto setup = ramp_setup(c, c.xi);
    if (c.hf_scan) {
        t.columns = {"h0", "C_nn", "C_nnn", "defect_density", "sz", "mean_purity"};
        for (const auto& r : ramp_scan(setup, c.tau,
                                       linear_grid(c.h_initial, setup.h_final, c.points),
                                       threads)) {
            t.add({r.h0, r.c_nn, r.c_nnn, r.defect_density, r.sz, r.mean_purity});
            out.clamp_count += r.clamp_count;
        }
        return out;
    }
    const auto r = setup.noise.kind == NoiseKind::ornstein_uhlenbeck
                       ? observe(trajectory_snapshot(c, threads))
                       : ramp_endpoint(setup, c.tau, threads);
    t.columns = {"tau", "h0", "C_nn", "C_nnn", "defect_density", "sz", "mean_purity"};
    t.add({c.tau, r.h0, r.c_nn, r.c_nnn, r.defect_density, r.sz, r.mean_purity});
    out.clamp_count = r.clamp_count;
    return out;
}

inline RunOutput run_sweep_tau(const ExperimentConfig& c, unsigned threads)
{
    RunOutput out;
    auto& t = out.tables["sweep_tau"];
    t.columns = {"tau", "C_nnn", "C_nn", "defect_density", "mean_purity"};
    const auto taus = parse_geometric(c.tau_grid, "tau-grid");
    const auto recs = sweep_tau(ramp_setup(c, c.xi), taus, threads);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        t.add({taus[i], recs[i].c_nnn, recs[i].c_nn, recs[i].defect_density,
               recs[i].mean_purity});
        out.clamp_count += recs[i].clamp_count;
    }
    return out;
}

inline RunOutput run_defects(const ExperimentConfig& c, unsigned threads)
{
    RunOutput out;
    auto& t = out.tables["defects"];
    t.columns = {"tau", "defect_density", "kz_reference"};
    const auto taus = parse_geometric(c.tau_grid, "tau-grid");
    const auto recs = sweep_tau(ramp_setup(c, c.xi), taus, threads);
    std::vector<double> n;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        n.push_back(recs[i].defect_density);
        t.add({taus[i], n.back(), kibble_zurek_density(taus[i])});
        out.clamp_count += recs[i].clamp_count;
    }
    try {
        out.results["tau_opt"] = estimate_tau_opt(taus, n);
    } catch (const NumericalError& e) {
        out.results["tau_opt"] = nullptr;
        out.results["tau_opt_note"] = e.what();
    }
    try {
        out.results["power_fit"] = to_json(fit_power_law(taus, n));
    } catch (const std::exception& e) {
        out.results["power_fit_note"] = e.what();
    }
    return out;
}

// Per-xi tau sweeps plus the entangled-window summary (tau_c, maximum,
// logarithmic fit over (2 tau0, tau_c)).
inline RunOutput run_sweep_xi(const ExperimentConfig& c, unsigned threads)
{
    RunOutput out;
    auto& curves = out.tables["sweep_xi"];
    auto& summary = out.tables["sweep_xi_summary"];
    curves.columns = {"xi", "tau", "C_nnn", "C_nn", "defect_density"};
    summary.columns = {"xi", "tau_c", "max_C_nnn", "log_slope", "log_r2", "log_zero_crossing"};
    const auto taus = parse_geometric(c.tau_grid, "tau-grid");
    const auto xis = parse_value_list(c.xi_grid, "xi-grid");
    const double nan = std::numeric_limits<double>::quiet_NaN();

    double tau0 = nan;
    try {
        tau0 = estimate_tau0(nnn_concurrence_probe(ramp_setup(c, 0.0)));
    } catch (const NumericalError& e) {
        out.results["tau0_note"] = e.what();
    }
    out.results["tau0"] = json_number(tau0);

    for (const double xi : xis) {
        const auto setup = ramp_setup(c, xi);
        const auto recs = sweep_tau(setup, taus, threads);
        std::map<double, double> cache;
        std::vector<double> cv;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            curves.add({xi, taus[i], recs[i].c_nnn, recs[i].c_nn, recs[i].defect_density});
            cache[taus[i]] = recs[i].c_nnn;
            cv.push_back(recs[i].c_nnn);
            out.clamp_count += recs[i].clamp_count;
        }
        const auto fresh = nnn_concurrence_probe(setup);
        const ConcurrenceProbe probe = [&](double tau) {
            const auto it = cache.find(tau);
            return it != cache.end() ? it->second : fresh(tau);
        };
        double tau_c = nan, slope = nan, r2 = nan, zero = nan;
        nlohmann::json note;
        try {
            tau_c = estimate_tau_c(probe, taus).tau_c;
            const auto f = fit_log_scaling(taus, cv, 2.0 * tau0, tau_c);
            slope = f.slope;
            r2 = f.r_squared;
            zero = f.zero_crossing();
        } catch (const std::exception& e) {
            note = e.what();
        }
        summary.add({xi, tau_c, max_value(cv), slope, r2, zero});
        if (!note.is_null()) {
            out.results["notes"][format_number(xi)] = note;
        }
    }
    return out;
}

inline RunOutput run_fit(const ExperimentConfig& c)
{
    RunOutput out;
    const auto table = read_csv(c.input);
    const auto x = column(table, c.x_column);
    const auto y = column(table, c.y_column);
    FitResult f;
    if (c.model == "power") {
        f = fit_power_law(x, y, c.fit_lo, c.fit_hi);
    } else if (c.model == "log") {
        f = fit_log_scaling(x, y, c.fit_lo, c.fit_hi);
    } else {
        std::vector<double> wx, wy;
        detail::select_window(x, y, c.fit_lo, c.fit_hi, wx, wy);
        f = fit_linear(wx, wy);
    }
    std::ifstream in(c.input, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.results["fit"] = to_json(f);
    out.results["fit"]["inputs_hash"] = stable_hash(bytes);
    out.results["fit"]["x_column"] = c.x_column;
    out.results["fit"]["y_column"] = c.y_column;
    return out;
}

struct OracleDeviation {
    double correlators = 0.0;
    double sz = 0.0;
    double concurrence = 0.0;
};

inline OracleDeviation oracle_deviation(const DenseChainState& ed, const ModeSnapshot& snap, int r)
{
    const auto b = spin_correlators_general(ab_correlators(snap, r), r);
    const auto a = ed_spin_correlators(ed, r);
    OracleDeviation d;
    d.correlators = std::max({std::abs(a.xx - b.xx), std::abs(a.yy - b.yy), std::abs(a.zz - b.zz),
                              std::abs(a.xy - b.xy), std::abs(a.yx - b.yx)});
    d.sz = std::abs(a.sz - b.sz);
    d.concurrence = std::abs(concurrence(reduced_rho(b)).c - ed_concurrence(ed, r));
    return d;
}

// Static ground states and two noiseless ramps against exact diagonalization.
inline RunOutput run_oracle_check(const ExperimentConfig& c)
{
    RunOutput out;
    auto& t = out.tables["oracle_check"];
    t.columns = {"tau", "h0", "r", "max_correlator_dev", "sz_dev", "concurrence_dev"};
    const int n = c.n_sites;
    const auto grid = build_grid(n);
    const auto add = [&](double tau, double h0, const DenseChainState& ed,
                         const ModeSnapshot& snap) {
        for (int r = 1; r <= std::min(3, n / 2); ++r) {
            const auto d = oracle_deviation(ed, snap, r);
            t.add({tau, h0, static_cast<double>(r), d.correlators, d.sz, d.concurrence});
            out.passed = out.passed && std::max({d.correlators, d.sz, d.concurrence}) <=
                                           oracle_tolerance;
        }
    };
    for (const double h0 : {0.2, 0.5, 1.0, 1.5, 3.0}) {
        add(0.0, h0, ed_ground_state(n, h0), ground_state_snapshot(grid, h0));
    }
    for (const double tau : {0.5, 5.0}) {
        const QuenchProtocol p{-5.0, 5.0, tau, 0.0};
        const std::vector<double> ts = {0.5 * p.end_time(), p.end_time()};
        const auto snaps = evolve_all_modes_path(grid, p, NoiseSpec{}, ts);
        auto ed = ed_ground_state(n, p.h_initial);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            ed = ed_evolve(ed, p, 0.005, ts[i]);
            add(tau, snaps[i].h0, ed, snaps[i]);
        }
    }
    out.results["tolerance"] = oracle_tolerance;
    out.results["passed"] = out.passed;
    return out;
}

}  // namespace detail

inline RunOutput compute(const ExperimentConfig& c, unsigned threads)
{
    validate(c);
    if (c.kind == "static") return detail::run_static(c);
    if (c.kind == "quench") return detail::run_quench(c, threads);
    if (c.kind == "sweep-tau") return detail::run_sweep_tau(c, threads);
    if (c.kind == "sweep-xi") return detail::run_sweep_xi(c, threads);
    if (c.kind == "defects") return detail::run_defects(c, threads);
    if (c.kind == "fit") return detail::run_fit(c);
    return detail::run_oracle_check(c);
}

inline std::filesystem::path manifest_path(const ExperimentConfig& c)
{
    return std::filesystem::path(c.out) / (c.kind + ".manifest.json");
}

inline nlohmann::json manifest_base(const ExperimentConfig& c, unsigned threads)
{
    nlohmann::json m;
    m["version"] = version;
    m["config"] = config_json(c);
    m["manifest_hash"] = config_hash(c);
    m["seed"] = c.seed;
    m["threads"] = threads;
    if (c.kind != "fit") {
        m["grid"] = {{"n_sites", c.n_sites}, {"modes", c.n_sites / 2},
                     {"momenta", "(2j-1) pi / N, j = 1..N/2"}};
    }
    return m;
}

// Runs the experiment and writes every artifact.  On a numerical abort the
// manifest records the message (mode and time included) before rethrowing.
inline RunOutput run(const ExperimentConfig& c, unsigned threads)
{
    const auto start = std::chrono::steady_clock::now();
    auto manifest = manifest_base(c, threads);
    RunOutput out;
    try {
        out = compute(c, threads);
    } catch (const NumericalError& e) {
        manifest["status"] = "numerical_error";
        manifest["error"] = e.what();
        write_text(manifest_path(c), manifest.dump(2) + "\n");
        throw;
    }
    const nlohmann::json header = {
        {"manifest_hash", config_hash(c)}, {"kind", c.kind}, {"version", version}};
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [stem, table] : out.tables) {
        const auto path = std::filesystem::path(c.out) / (stem + ".csv");
        write_text(path, render_csv(table, header));
        files.push_back(path.filename().string());
    }
    if (c.kind == "fit") {
        const auto path = std::filesystem::path(c.out) / "fit.json";
        write_text(path, out.results["fit"].dump(2) + "\n");
        files.push_back(path.filename().string());
    }
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    manifest["status"] = "ok";
    manifest["files"] = files;
    manifest["results"] = out.results;
    manifest["clamp_count"] = out.clamp_count;
    manifest["wall_time_s"] = wall.count();
    write_text(manifest_path(c), manifest.dump(2) + "\n");
    return out;
}

}  // namespace quenchlab
