#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "quenchlab/correlators.hpp"
#include "quenchlab/error.hpp"

namespace quenchlab {

using Mat4 = Eigen::Matrix4cd;

// Two-spin reduced density matrix in the basis {uu, ud, du, dd} (u = s^z up).
struct ReducedTwoSpinState {
    Mat4 kappa = Mat4::Zero();
    double min_eigenvalue = 0.0;
};

inline ReducedTwoSpinState reduced_rho(const SpinCorrelatorSet& s)
{
    const cplx i1(0.0, 1.0);
    ReducedTwoSpinState out;
    auto& k = out.kappa;
    k(0, 0) = 0.25 + s.sz + s.zz;
    k(1, 1) = 0.25 - s.zz;
    k(2, 2) = 0.25 - s.zz;
    k(3, 3) = 0.25 - s.sz + s.zz;
    k(1, 2) = s.xx + s.yy + i1 * (s.xy - s.yx);
    k(2, 1) = std::conj(k(1, 2));
    k(0, 3) = s.xx - s.yy - i1 * (s.xy + s.yx);
    k(3, 0) = std::conj(k(0, 3));

    const double trace = k.trace().real();
    if (std::abs(trace - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "reduced density matrix trace " << trace << " at r = " << s.r;
        throw NumericalError(msg.str());
    }
    // the coherences carry complex xy/yx; symmetrize the Hermitian part
    const Mat4 herm = 0.5 * (k + k.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat4> es(herm, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    if (out.min_eigenvalue < -1e-7) {
        std::ostringstream msg;
        msg << "reduced density matrix eigenvalue " << out.min_eigenvalue << " at r = " << s.r
            << " (sz = " << s.sz << ", xx = " << s.xx << ", yy = " << s.yy
            << ", zz = " << s.zz << ")";
        throw NumericalError(msg.str());
    }
    return out;
}

struct ConcurrenceValue {
    double c = 0.0;
    std::array<double, 4> lambdas{};  // descending
};

inline ConcurrenceValue concurrence(const Mat4& rho)
{
    Mat4 yy = Mat4::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Mat4 flipped = yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Mat4> es(rho * flipped, false);
    ConcurrenceValue out;
    for (int i = 0; i < 4; ++i) {
        out.lambdas[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    }
    std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
    out.c = std::max(0.0, out.lambdas[0] - out.lambdas[1] - out.lambdas[2] - out.lambdas[3]);
    return out;
}

inline ConcurrenceValue concurrence(const ReducedTwoSpinState& rho)
{
    return concurrence(rho.kappa);
}

}  // namespace quenchlab
