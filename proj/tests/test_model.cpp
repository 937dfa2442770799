#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "quenchlab/model.hpp"

using namespace quenchlab;

TEST(Grid, SmallChains)
{
    const auto g4 = build_grid(4);
    ASSERT_EQ(g4.size(), 2u);
    EXPECT_DOUBLE_EQ(g4.momenta[0], pi / 4);
    EXPECT_DOUBLE_EQ(g4.momenta[1], 3 * pi / 4);

    const auto g6 = build_grid(6);
    ASSERT_EQ(g6.size(), 3u);
    EXPECT_DOUBLE_EQ(g6.momenta[1], pi / 2);
    EXPECT_DOUBLE_EQ(g6.momenta[2], 5 * pi / 6);
}

TEST(Grid, ReferenceSize)
{
    const auto g = build_grid(200);
    ASSERT_EQ(g.size(), 100u);
    EXPECT_DOUBLE_EQ(g.momenta.front(), pi / 200);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_GT(g.momenta[i], 0.0);
        EXPECT_LT(g.momenta[i], pi);
        if (i > 0) {
            EXPECT_GT(g.momenta[i], g.momenta[i - 1]);
        }
    }
}

TEST(Grid, RejectsBadSizes)
{
    EXPECT_THROW(build_grid(7), ConfigError);
    EXPECT_THROW(build_grid(2), ConfigError);
    EXPECT_THROW(build_grid(0), ConfigError);
}

TEST(Protocol, Ramp)
{
    QuenchProtocol p{-30.0, 30.0, 5.0, 1.0};
    EXPECT_DOUBLE_EQ(p.field(1.0), -30.0);
    EXPECT_DOUBLE_EQ(p.end_time() - p.t_initial, 300.0);
    EXPECT_DOUBLE_EQ(p.field(p.end_time()), 30.0);

    QuenchProtocol down{2.0, -1.0, 4.0, 0.0};
    EXPECT_DOUBLE_EQ(down.end_time(), 12.0);
    EXPECT_DOUBLE_EQ(down.field(4.0), 1.0);

    EXPECT_THROW((QuenchProtocol{0.0, 1.0, 0.0, 0.0}.validate()), ConfigError);
    EXPECT_THROW((QuenchProtocol{1.0, 1.0, 1.0, 0.0}.validate()), ConfigError);
    EXPECT_THROW((NoiseSpec{NoiseKind::white, -0.1, 0.0}.validate()), ConfigError);
    EXPECT_THROW((NoiseSpec{NoiseKind::ornstein_uhlenbeck, 0.1, 0.0}.validate()), ConfigError);
}

TEST(Coefficients, Examples)
{
    const double k = 0.7;
    auto c = mode_coefficients(std::cos(k), k);
    EXPECT_NEAR(c.h_k, 0.0, 1e-15);
    EXPECT_NEAR(c.eps_k, std::sin(k), 1e-15);
    EXPECT_NEAR(c.theta_k, pi / 4, 1e-15);

    c = mode_coefficients(1e8, k);
    EXPECT_GT(c.theta_k, 0.0);
    EXPECT_LT(c.theta_k, 1e-8);
    EXPECT_NEAR(c.eps_k / (1e8 - std::cos(k)), 1.0, 1e-12);

    c = mode_coefficients(0.0, pi / 2);
    EXPECT_NEAR(c.h_k, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(c.delta_k, 1.0);
    EXPECT_DOUBLE_EQ(c.eps_k, 1.0);
}

TEST(Coefficients, AngleIdentitiesAndContinuity)
{
    for (const double k : build_grid(40).momenta) {
        double prev = mode_coefficients(-30.0, k).theta_k;
        for (double h = -30.0; h <= 30.0; h += 0.01) {
            const auto c = mode_coefficients(h, k);
            EXPECT_GE(c.eps_k, std::sin(k));
            EXPECT_NEAR(std::sin(2 * c.theta_k), c.delta_k / c.eps_k, 1e-12);
            EXPECT_NEAR(std::cos(2 * c.theta_k), c.h_k / c.eps_k, 1e-12);
            EXPECT_GT(c.theta_k, -pi / 2);
            EXPECT_LE(c.theta_k, pi / 2);
            // |d theta / d h0| <= 1 / (2 sin k); a branch jump would be ~pi/2
            EXPECT_LE(std::abs(c.theta_k - prev), 0.01 / (2.0 * std::sin(k)) + 1e-12);
            prev = c.theta_k;
        }
    }
}

TEST(GroundState, Limits)
{
    const auto low = ground_state_density(-1e9, 1.0);
    EXPECT_NEAR(low.rho(1, 1).real(), 1.0, 1e-12);
    const auto high = ground_state_density(1e9, 1.0);
    EXPECT_NEAR(high.rho(0, 0).real(), 1.0, 1e-12);
}

TEST(GroundState, EigenvectorAndCommutation)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> hd(-10.0, 10.0), kd(1e-3, pi - 1e-3);
    for (int i = 0; i < 1000; ++i) {
        const double h = hd(rng), k = kd(rng);
        const auto c = mode_coefficients(h, k);
        const Mat2 ham = mode_hamiltonian(h, k);
        const Eigen::Vector2cd lower = eigenbasis(c.theta_k).col(0);
        const Eigen::Vector2cd upper = eigenbasis(c.theta_k).col(1);
        EXPECT_LT((ham * lower + c.eps_k * lower).norm(), 1e-12);
        EXPECT_LT((ham * upper - c.eps_k * upper).norm(), 1e-12);
        const auto g = ground_state_density(h, k);
        EXPECT_LT((ham * g.rho - g.rho * ham).norm(), 1e-12);
        EXPECT_NEAR(g.trace(), 1.0, 1e-14);
        EXPECT_NEAR(g.purity(), 1.0, 1e-14);
    }
}

TEST(Adiabaticity, Index)
{
    EXPECT_DOUBLE_EQ(adiabaticity_index(500.0, 1.0), 0.002);
    EXPECT_DOUBLE_EQ(adiabaticity_index(0.2, 0.01), 500.0);
    EXPECT_TRUE(std::isinf(adiabaticity_index(1.0, 0.0)));
}
