#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "quenchlab/error.hpp"

namespace quenchlab {

namespace detail {

template <typename Scalar>
Scalar pfaffian_expansion(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m)
{
    const auto n = m.rows();
    if (n == 0) {
        return Scalar(1);
    }
    if (n == 2) {
        return m(0, 1);
    }
    if (n == 4) {
        return m(0, 1) * m(2, 3) - m(0, 2) * m(1, 3) + m(0, 3) * m(1, 2);
    }
    // expansion along the first row
    Scalar acc(0);
    for (Eigen::Index j = 1; j < n; ++j) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> minor(n - 2, n - 2);
        Eigen::Index ri = 0;
        for (Eigen::Index r = 1; r < n; ++r) {
            if (r == j) continue;
            Eigen::Index ci = 0;
            for (Eigen::Index c = 1; c < n; ++c) {
                if (c == j) continue;
                minor(ri, ci++) = m(r, c);
            }
            ++ri;
        }
        const Scalar term = m(0, j) * pfaffian_expansion<Scalar>(minor);
        acc += (j % 2 == 1) ? term : -term;
    }
    return acc;
}

// Parlett-Reid style elimination with pivoting; each step reduces the
// leading 2x2 block and updates the trailing skew matrix in place.
template <typename Scalar>
Scalar pfaffian_elimination(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a)
{
    const auto n = a.rows();
    Scalar pf(1);
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index p = k + 1;
        double best = std::abs(a(k, k + 1));
        for (Eigen::Index i = k + 2; i < n; ++i) {
            if (std::abs(a(k, i)) > best) {
                best = std::abs(a(k, i));
                p = i;
            }
        }
        if (p != k + 1) {
            a.row(k + 1).swap(a.row(p));
            a.col(k + 1).swap(a.col(p));
            pf = -pf;
        }
        const Scalar pivot = a(k, k + 1);
        if (pivot == Scalar(0)) {
            return Scalar(0);
        }
        pf *= pivot;
        if (k + 2 < n) {
            const auto m = n - k - 2;
            // tau_i = a(k, i) / a(k, k+1) for i > k+1
            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau =
                a.row(k).segment(k + 2, m).transpose() / pivot;
            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col = a.col(k + 1).segment(k + 2, m);
            // A' = A - tau col^T + col tau^T keeps skew symmetry
            a.block(k + 2, k + 2, m, m) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

}  // namespace detail

// Pfaffian of a skew-symmetric matrix of even dimension.
template <typename Derived>
typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& input, double skew_tol = 1e-10)
{
    using Scalar = typename Derived::Scalar;
    using Dyn = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Dyn m = input;
    if (m.rows() != m.cols()) {
        throw ConfigError("pfaffian needs a square matrix");
    }
    if (m.rows() % 2 != 0) {
        throw ConfigError("pfaffian needs an even dimension, got " + std::to_string(m.rows()));
    }
    if (m.rows() == 0) {
        return Scalar(1);
    }
    const double scale = std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
    if ((m + m.transpose()).cwiseAbs().maxCoeff() > skew_tol * scale) {
        throw ConfigError("pfaffian input is not skew-symmetric");
    }
    if (m.rows() <= 6) {
        return detail::pfaffian_expansion<Scalar>(m);
    }
    return detail::pfaffian_elimination<Scalar>(m);
}

}  // namespace quenchlab
