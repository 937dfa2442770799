#include <bit>

#include <gtest/gtest.h>

#include "quenchlab/observables.hpp"
#include "quenchlab/oracle.hpp"

using namespace quenchlab;

TEST(Oracle, GroundEnergyMatchesFreeFermions)
{
    for (const int n : {4, 6, 8}) {
        for (const double h0 : {0.0, 0.5, 2.0}) {
            double e = 0.0;
            ed_ground_state(n, h0, &e);
            EXPECT_NEAR(e, free_fermion_ground_energy(n, h0), 1e-9) << n << " " << h0;
        }
    }
}

TEST(Oracle, GroundStateLimits)
{
    double e = 0.0;
    ed_ground_state(8, 1e4, &e);
    EXPECT_NEAR(e / (-8 * 1e4 / 2), 1.0, 1e-6);

    // zero field, N = 4: the x-basis cat state (|++++> + |---->)/sqrt(2),
    // which in the z basis is the uniform even-weight superposition
    const auto ghz = ed_ground_state(4, 0.0);
    for (Eigen::Index s = 0; s < 16; ++s) {
        const bool even = std::popcount(static_cast<unsigned>(s)) % 2 == 0;
        EXPECT_NEAR(std::abs(ghz.amplitudes(s) - (even ? ghz.amplitudes(0) : 0.0)), 0.0, 1e-12);
    }
    EXPECT_NEAR(std::norm(ghz.amplitudes(0)), 0.125, 1e-12);
    EXPECT_NEAR(ghz.norm(), 1.0, 1e-12);

    EXPECT_THROW(ed_ground_state(14, 1.0), ConfigError);
    EXPECT_THROW(ed_ground_state(7, 1.0), ConfigError);
}

TEST(Oracle, StaticCorrelatorsMatchPipeline)
{
    for (const int n : {6, 8, 10}) {
        for (const double h0 : {0.2, 0.5, 1.0, 1.1, 1.5, 3.0}) {
            const auto ed = ed_ground_state(n, h0);
            const auto corr = ab_correlators(ground_state_snapshot(build_grid(n), h0), 3);
            for (int r = 1; r <= 3; ++r) {
                const auto a = ed_spin_correlators(ed, r);
                const auto b = spin_correlators_general(corr, r);
                EXPECT_NEAR(a.xx, b.xx, 1e-9) << "xx r=" << r << " h=" << h0;
                EXPECT_NEAR(a.yy, b.yy, 1e-9) << "yy r=" << r << " h=" << h0;
                EXPECT_NEAR(a.zz, b.zz, 1e-9) << "zz r=" << r << " h=" << h0;
                EXPECT_NEAR(std::abs(a.xy - b.xy), 0.0, 1e-9) << "xy r=" << r << " h=" << h0;
                EXPECT_NEAR(std::abs(a.yx - b.yx), 0.0, 1e-9) << "yx r=" << r << " h=" << h0;
                EXPECT_NEAR(a.sz, b.sz, 1e-9);
                const auto kappa = reduced_rho(b).kappa;
                EXPECT_LT((kappa - ed_reduced_rho(ed, 0, r)).norm(), 1e-8);
                EXPECT_NEAR(concurrence(kappa).c, ed_concurrence(ed, r), 1e-7);
            }
        }
    }
}

TEST(Oracle, RampMatchesPipeline)
{
    const int n = 8;
    for (const double tau : {0.5, 5.0}) {
        QuenchProtocol p{-5.0, 5.0, tau, 0.0};
        const std::vector<double> ts = {0.3 * p.end_time(), 0.55 * p.end_time(), p.end_time()};
        const auto snaps = evolve_all_modes_path(build_grid(n), p, NoiseSpec{}, ts);
        auto ed = ed_ground_state(n, p.h_initial);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            ed = ed_evolve(ed, p, 0.005, ts[i]);
            const auto corr = ab_correlators(snaps[i], 3);
            for (int r = 1; r <= 3; ++r) {
                const auto a = ed_spin_correlators(ed, r);
                const auto b = spin_correlators_general(corr, r);
                EXPECT_NEAR(a.xx, b.xx, 1e-7) << "xx r=" << r << " t=" << ts[i];
                EXPECT_NEAR(a.yy, b.yy, 1e-7) << "yy r=" << r << " t=" << ts[i];
                EXPECT_NEAR(a.zz, b.zz, 1e-7) << "zz r=" << r << " t=" << ts[i];
                EXPECT_NEAR(std::abs(a.xy - b.xy), 0.0, 1e-7) << "xy " << a.xy << b.xy;
                EXPECT_NEAR(std::abs(a.yx - b.yx), 0.0, 1e-7) << "yx " << a.yx << b.yx;
                EXPECT_NEAR(a.sz, b.sz, 1e-7);
            }
        }
    }
}

TEST(Oracle, EvolutionLimits)
{
    const int n = 6;
    // slow ramp in the paramagnet: stays in the instantaneous ground state
    const QuenchProtocol slow{2.0, 4.0, 40.0, 0.0};
    const auto a = ed_evolve(ed_ground_state(n, 2.0), slow, 0.02);
    EXPECT_GT(std::norm(ed_ground_state(n, 4.0).amplitudes.dot(a.amplitudes)), 0.999);
    EXPECT_NEAR(a.norm(), 1.0, 1e-10);

    // sudden ramp leaves the state behind
    const QuenchProtocol fast{-2.0, 2.0, 1e-4, 0.0};
    const auto start = ed_ground_state(n, -2.0);
    const auto b = ed_evolve(start, fast, 1e-5);
    EXPECT_GT(std::norm(start.amplitudes.dot(b.amplitudes)), 0.999);
    EXPECT_NEAR(b.norm(), 1.0, 1e-10);
}
