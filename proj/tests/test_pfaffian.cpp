#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "quenchlab/pfaffian.hpp"

using namespace quenchlab;
using cplx = std::complex<double>;

namespace {

Eigen::MatrixXcd random_skew(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = cplx(g(rng), g(rng));
            m(j, i) = -m(i, j);
        }
    }
    return m;
}

}  // namespace

TEST(Pfaffian, SmallCases)
{
    Eigen::MatrixXd m2(2, 2);
    m2 << 0, 3, -3, 0;
    EXPECT_DOUBLE_EQ(pfaffian(m2), 3.0);

    Eigen::MatrixXd m4 = Eigen::MatrixXd::Zero(4, 4);
    const double a = 1.5, b = -2.0, c = 0.5, d = 4.0, e = 1.25, f = -0.75;
    m4(0, 1) = a; m4(0, 2) = b; m4(0, 3) = c;
    m4(1, 2) = d; m4(1, 3) = e; m4(2, 3) = f;
    m4 -= Eigen::MatrixXd(m4.transpose());
    EXPECT_NEAR(pfaffian(m4), a * f - b * e + c * d, 1e-14);

    // block-diagonal standard form: pf = product of the blocks
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(8, 8);
    for (int i = 0; i < 4; ++i) {
        j(2 * i, 2 * i + 1) = i + 1.0;
        j(2 * i + 1, 2 * i) = -(i + 1.0);
    }
    EXPECT_NEAR(pfaffian(j), 24.0, 1e-12);

    EXPECT_EQ(pfaffian(Eigen::MatrixXd(0, 0)), 1.0);
}

TEST(Pfaffian, SquareEqualsDeterminant)
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 * (1 + trial % 6);
        const auto m = random_skew(n, rng);
        const cplx pf = pfaffian(m);
        const cplx det = m.determinant();
        EXPECT_LT(std::abs(pf * pf - det), 1e-8 * std::max(1.0, std::abs(det))) << "n = " << n;
    }
}

TEST(Pfaffian, EliminationMatchesExpansion)
{
    std::mt19937_64 rng(7);
    for (const int n : {2, 4, 6, 8}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto m = random_skew(n, rng);
            const cplx a = detail::pfaffian_expansion<cplx>(m);
            const cplx b = detail::pfaffian_elimination<cplx>(m);
            EXPECT_LT(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST(Pfaffian, NeedsPivoting)
{
    // zero in the leading superdiagonal position
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
    m(0, 2) = 1.0; m(1, 3) = 2.0; m(4, 5) = 3.0; m(1, 4) = 0.5;
    m -= Eigen::MatrixXd(m.transpose());
    const double pf = detail::pfaffian_elimination<double>(m);
    EXPECT_NEAR(pf * pf, m.determinant(), 1e-12);
    EXPECT_NEAR(pf, detail::pfaffian_expansion<double>(m), 1e-12);
}

TEST(Pfaffian, Rejections)
{
    EXPECT_THROW(pfaffian(Eigen::MatrixXd::Zero(3, 3)), ConfigError);
    EXPECT_THROW(pfaffian(Eigen::MatrixXd::Zero(2, 4)), ConfigError);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 1) = 1.0;
    EXPECT_THROW(pfaffian(m), ConfigError);
}
