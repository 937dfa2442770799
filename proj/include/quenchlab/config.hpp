#pragma once

// Experiment configuration: one flat record shared by every subcommand,
// validated per kind before any compute starts.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quenchlab/dynamics.hpp"
#include "quenchlab/error.hpp"
#include "quenchlab/io.hpp"
#include "quenchlab/scaling.hpp"

namespace quenchlab {

inline constexpr const char* version = "0.1.0";

struct ExperimentConfig {
    std::string kind = "quench";
    int n_sites = 200;
    double h_initial = -30.0;
    std::optional<double> h_final;  // default depends on pair
    std::string pair = "nnn";       // nn: h_f defaults to 5, nnn: 30
    double tau = 10.0;
    std::string tau_grid = "1:1000:24";  // lo:hi:points-per-decade
    double xi = 0.0;
    std::string xi_grid = "0.002,0.003,0.004,0.006,0.008,0.01";
    std::string noise = "white";
    double tau_n = 0.0;
    std::uint64_t seed = 1;
    std::int64_t trajectories = 200;  // ou noise only
    double trajectory_dt = 1e-3;
    int points = 601;  // field samples for static curves and --hf-scan
    bool hf_scan = false;
    IntegratorParams integrator{};
    std::string method = "magnus4";
    // fit
    std::string input;
    std::string x_column = "tau";
    std::string y_column = "C_nnn";
    std::string model = "power";
    double fit_lo = 0.0;
    double fit_hi = 1e300;
    // not part of the result identity
    std::string out = "quenchlab-out";
    int threads = 0;

    [[nodiscard]] double resolved_h_final() const
    {
        return h_final ? *h_final : (pair == "nn" ? 5.0 : 30.0);
    }
};

inline Integrator parse_integrator(const std::string& s)
{
    if (s == "magnus4") return Integrator::magnus4;
    if (s == "cf4") return Integrator::cf4;
    if (s == "rk4") return Integrator::rk4;
    throw ConfigError("unknown integrator '" + s + "' (magnus4, cf4, rk4)");
}

inline NoiseSpec noise_spec(const ExperimentConfig& c, double xi)
{
    if (c.noise != "white" && c.noise != "ou") {
        throw ConfigError("unknown noise kind '" + c.noise + "' (white, ou)");
    }
    NoiseSpec s{c.noise == "ou" ? NoiseKind::ornstein_uhlenbeck : NoiseKind::white, xi, c.tau_n};
    s.validate();
    return s;
}

inline double parse_number(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("malformed number '" + s + "' in " + what);
}

// "lo:hi:ppd" as a geometric grid.
inline std::vector<double> parse_geometric(const std::string& text, const std::string& what)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) {
        parts.push_back(p);
    }
    if (parts.size() != 3) {
        throw ConfigError(what + " must be lo:hi:points-per-decade, got '" + text + "'");
    }
    const double ppd = parse_number(parts[2], what);
    if (ppd != static_cast<int>(ppd)) {
        throw ConfigError(what + ": points per decade must be an integer");
    }
    return geometric_grid(parse_number(parts[0], what), parse_number(parts[1], what),
                          static_cast<int>(ppd));
}

// Either a geometric "lo:hi:ppd" or a comma-separated list.
inline std::vector<double> parse_value_list(const std::string& text, const std::string& what)
{
    if (text.find(':') != std::string::npos) {
        return parse_geometric(text, what);
    }
    std::vector<double> out;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ',')) {
        out.push_back(parse_number(p, what));
    }
    if (out.empty()) {
        throw ConfigError(what + " is empty");
    }
    return out;
}

inline IntegratorParams integrator_params(const ExperimentConfig& c)
{
    auto p = c.integrator;
    p.method = parse_integrator(c.method);
    p.validate();
    return p;
}

// Identity of a run: everything that can change the numbers.  Worker count and
// output directory are left out so they cannot perturb the CSV bytes.
inline nlohmann::json config_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["kind"] = c.kind;
    j["n"] = c.n_sites;
    j["hi"] = c.h_initial;
    j["hf"] = c.resolved_h_final();
    j["pair"] = c.pair;
    j["tau"] = c.tau;
    j["tau_grid"] = c.tau_grid;
    j["xi"] = c.xi;
    j["xi_grid"] = c.xi_grid;
    j["noise"] = c.noise;
    j["tau_n"] = c.tau_n;
    j["seed"] = c.seed;
    j["trajectories"] = c.trajectories;
    j["trajectory_dt"] = c.trajectory_dt;
    j["points"] = c.points;
    j["hf_scan"] = c.hf_scan;
    j["integrator"] = {{"method", c.method},
                       {"dt_max", c.integrator.dt_max},
                       {"safety", c.integrator.safety},
                       {"max_phase", c.integrator.max_phase},
                       {"field_step", c.integrator.field_step}};
    if (c.kind == "fit") {
        j["fit"] = {{"input", c.input}, {"x", c.x_column}, {"y", c.y_column},
                    {"model", c.model}, {"lo", c.fit_lo}, {"hi", c.fit_hi}};
    }
    return j;
}

inline std::string config_hash(const ExperimentConfig& c)
{
    return stable_hash(config_json(c).dump());
}

// Checks the fields each kind depends on.
inline void validate(const ExperimentConfig& c)
{
    static const std::vector<std::string> kinds = {"static",  "quench", "sweep-tau",
                                                   "sweep-xi", "defects", "fit",
                                                   "oracle-check"};
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) {
        throw ConfigError("unknown experiment kind '" + c.kind + "'");
    }
    if (c.pair != "nn" && c.pair != "nnn") {
        throw ConfigError("pair must be nn or nnn");
    }
    if (c.kind == "fit") {
        if (c.input.empty()) {
            throw ConfigError("fit needs --input CSV");
        }
        if (c.model != "power" && c.model != "log" && c.model != "linear") {
            throw ConfigError("fit model must be power, log or linear");
        }
        if (!(c.fit_lo < c.fit_hi)) {
            throw ConfigError("fit window needs lo < hi");
        }
        return;
    }
    build_grid(c.n_sites);  // throws on bad N
    if (c.kind == "oracle-check") {
        if (c.n_sites > 10) {
            throw ConfigError("oracle-check runs exact diagonalization; use --n <= 10");
        }
        return;
    }
    if (c.kind == "static") {
        if (c.points < 2) {
            throw ConfigError("static curve needs >= 2 points");
        }
        return;
    }
    if (c.resolved_h_final() == c.h_initial) {
        throw ConfigError("ramp endpoints must differ (h_f == h_i)");
    }
    integrator_params(c);
    const auto noise = noise_spec(c, c.xi);
    if (c.kind == "quench") {
        if (!(c.tau > 0.0)) {
            throw ConfigError("tau must be positive");
        }
        if (c.hf_scan && c.points < 2) {
            throw ConfigError("--hf-scan needs >= 2 points");
        }
        if (noise.kind == NoiseKind::ornstein_uhlenbeck) {
            if (c.hf_scan) {
                throw ConfigError("ou noise runs through trajectories; --hf-scan is white only");
            }
            if (c.trajectories < 1 || !(c.trajectory_dt > 0.0)) {
                throw ConfigError("ou noise needs trajectories >= 1 and trajectory_dt > 0");
            }
        }
        return;
    }
    if (noise.kind == NoiseKind::ornstein_uhlenbeck) {
        throw ConfigError("ou noise is supported by quench only (trajectory average)");
    }
    parse_geometric(c.tau_grid, "tau-grid");
    if (c.kind == "sweep-xi") {
        for (const double x : parse_value_list(c.xi_grid, "xi-grid")) {
            noise_spec(c, x);
        }
    }
}

}  // namespace quenchlab
