#pragma once

// Experiment building blocks shared by the command-line tool and the
// acceptance runner: ramps read out along the way, tau sweeps and threshold
// searches on the next-nearest-neighbour concurrence.

#include <cmath>
#include <vector>

#include "quenchlab/dynamics.hpp"
#include "quenchlab/observables.hpp"
#include "quenchlab/parallel.hpp"
#include "quenchlab/scaling.hpp"

namespace quenchlab {

struct RampSetup {
    int n_sites = 200;
    double h_initial = -30.0;
    double h_final = 30.0;
    NoiseSpec noise{};
    IntegratorParams params{};

    [[nodiscard]] QuenchProtocol protocol(double tau) const
    {
        return QuenchProtocol{h_initial, h_final, tau, 0.0};
    }
};

// Observables at the end of one ramp.
inline ObservableRecord ramp_endpoint(const RampSetup& setup, double tau, unsigned threads = 1)
{
    const auto p = setup.protocol(tau);
    return observe(
        evolve_all_modes(build_grid(setup.n_sites), p, setup.noise, p.end_time(), setup.params,
                         threads));
}

// Observables of one ramp read out as h0(t) passes each value in `fields`
// (ordered along the ramp).
inline std::vector<ObservableRecord> ramp_scan(const RampSetup& setup, double tau,
                                               const std::vector<double>& fields,
                                               unsigned threads = 1)
{
    const auto p = setup.protocol(tau);
    std::vector<double> ts;
    ts.reserve(fields.size());
    for (const double h : fields) {
        ts.push_back(p.time_at(h));
    }
    const auto snaps = evolve_all_modes_path(build_grid(setup.n_sites), p, setup.noise, ts,
                                             setup.params, threads);
    std::vector<ObservableRecord> out;
    out.reserve(snaps.size());
    for (const auto& s : snaps) {
        out.push_back(observe(s));
    }
    return out;
}

// One ramp per tau; the points are spread over the workers.
inline std::vector<ObservableRecord> sweep_tau(const RampSetup& setup,
                                               const std::vector<double>& taus,
                                               unsigned threads = 1)
{
    return parallel_map<ObservableRecord>(taus.size(), threads, [&](std::size_t i) {
        return ramp_endpoint(setup, taus[i], 1);
    });
}

// Instantaneous ground-state observables at each field value.
inline std::vector<ObservableRecord> static_curve(int n_sites, const std::vector<double>& fields)
{
    std::vector<ObservableRecord> out;
    const auto grid = build_grid(n_sites);
    for (const double h : fields) {
        auto rec = observe(ground_state_snapshot(grid, h));
        rec.t = 0.0;
        out.push_back(rec);
    }
    return out;
}

// Evenly spaced values from a to b inclusive.
inline std::vector<double> linear_grid(double a, double b, int points)
{
    if (points < 2) {
        throw ConfigError("a linear grid needs >= 2 points");
    }
    std::vector<double> g;
    for (int i = 0; i < points; ++i) {
        g.push_back(a + (b - a) * i / (points - 1));
    }
    g.back() = b;
    return g;
}

inline ConcurrenceProbe nnn_concurrence_probe(const RampSetup& setup)
{
    return [setup](double tau) { return ramp_endpoint(setup, tau).c_nnn; };
}

}  // namespace quenchlab
