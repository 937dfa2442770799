#pragma once

#include <cmath>

#include "quenchlab/correlators.hpp"
#include "quenchlab/dynamics.hpp"
#include "quenchlab/entanglement.hpp"
#include "quenchlab/numeric.hpp"

namespace quenchlab {

// Mean quasiparticle occupation over all N momenta, n = (2/N) sum_{k>0} d22.
inline double defect_density(const ModeSnapshot& snap)
{
    CompensatedSum<double> acc;
    for (const auto& m : snap.modes) {
        acc.add(m.d22);
    }
    return 2.0 * acc.value() / snap.n_sites;
}

// Excitation probability of mode k after an infinite noiseless ramp at rate
// 1/tau through its avoided crossing (gap 2 sin k, slope 2/tau).
inline double landau_zener_reference(double k, double tau)
{
    const double s = std::sin(k);
    return std::exp(-pi * s * s * tau);
}

// Small-k Gaussian integral of landau_zener_reference around k = 0 and pi.
inline double kibble_zurek_density(double tau)
{
    return 1.0 / (pi * std::sqrt(tau));
}

inline double mean_purity(const ModeSnapshot& snap)
{
    CompensatedSum<double> acc;
    for (const auto& m : snap.modes) {
        acc.add(m.purity());
    }
    return acc.value() / static_cast<double>(snap.modes.size());
}

struct ObservableRecord {
    double t = 0.0;
    double h0 = 0.0;
    double defect_density = 0.0;
    double sz = 0.0;
    double mean_purity = 1.0;
    double c_nn = 0.0;   // C_{l,l+1}
    double c_nnn = 0.0;  // C_{l,l+2}
    int clamp_count = 0;
};

inline ObservableRecord observe(const ModeSnapshot& snap)
{
    const auto corr = ab_correlators(snap, 2);
    const auto s1 = spin_correlators_r1(corr);
    const auto s2 = spin_correlators_r2(corr);
    ObservableRecord rec;
    rec.t = snap.t;
    rec.h0 = snap.h0;
    rec.defect_density = defect_density(snap);
    rec.sz = s1.sz;
    rec.mean_purity = mean_purity(snap);
    rec.c_nn = concurrence(reduced_rho(s1)).c;
    rec.c_nnn = concurrence(reduced_rho(s2)).c;
    rec.clamp_count = snap.clamp_count;
    return rec;
}

}  // namespace quenchlab
