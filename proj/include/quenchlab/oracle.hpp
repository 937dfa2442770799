#pragma once

// Dense exact-diagonalization reference for short periodic chains,
//   H = -sum_j (2 s^x_j s^x_{j+1} - h0 s^z_j),
// on the full 2^N space.  Bit j of a basis index is 1 when spin j points up.

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quenchlab/correlators.hpp"
#include "quenchlab/entanglement.hpp"
#include "quenchlab/error.hpp"
#include "quenchlab/model.hpp"

namespace quenchlab {

struct DenseChainState {
    int n_sites = 0;
    double h0 = 0.0;
    double t = 0.0;
    Eigen::VectorXcd amplitudes;

    [[nodiscard]] double norm() const { return amplitudes.norm(); }
};

namespace detail {

inline void check_ed_size(int n, int n_max)
{
    if (n < 4 || n > n_max || n % 2 != 0) {
        throw ConfigError("exact diagonalization needs even 4 <= N <= " +
                          std::to_string(n_max) + ", got N = " + std::to_string(n));
    }
}

// sum_j s^z_j for each basis state
inline Eigen::VectorXd sz_diagonal(int n)
{
    const std::size_t dim = std::size_t{1} << n;
    Eigen::VectorXd d(static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
        d(static_cast<Eigen::Index>(s)) = std::popcount(s) - 0.5 * n;
    }
    return d;
}

// out = H psi with H = -(1/2) sum sigma^x sigma^x + h0 * sz
inline void apply_chain_hamiltonian(int n, double h0, const Eigen::VectorXd& sz,
                                    const Eigen::VectorXcd& psi, Eigen::VectorXcd& out)
{
    out = (h0 * sz.array()).cast<cplx>() * psi.array();
    const auto dim = psi.size();
    for (int j = 0; j < n; ++j) {
        const std::size_t mask = (std::size_t{1} << j) | (std::size_t{1} << ((j + 1) % n));
        for (Eigen::Index s = 0; s < dim; ++s) {
            out(s) -= 0.5 * psi(static_cast<Eigen::Index>(static_cast<std::size_t>(s) ^ mask));
        }
    }
}

// psi <- exp(-i H dt) psi by Taylor series
inline void chain_exponential(int n, double h0, const Eigen::VectorXd& sz, double dt,
                              Eigen::VectorXcd& psi)
{
    Eigen::VectorXcd term = psi;
    Eigen::VectorXcd next(psi.size());
    const double scale = psi.norm();
    for (int k = 1; k < 200; ++k) {
        apply_chain_hamiltonian(n, h0, sz, term, next);
        term = next * cplx(0.0, -dt / k);
        psi += term;
        if (term.norm() < 1e-17 * scale) {
            return;
        }
    }
    throw NumericalError("exact propagator series did not converge; reduce dt");
}

}  // namespace detail

inline Eigen::MatrixXd ed_even_hamiltonian(int n, double h0, std::vector<std::size_t>& states)
{
    const std::size_t dim = std::size_t{1} << n;
    states.clear();
    std::vector<Eigen::Index> position(dim, -1);
    for (std::size_t s = 0; s < dim; ++s) {
        if (std::popcount(s) % 2 == 0) {
            position[s] = static_cast<Eigen::Index>(states.size());
            states.push_back(s);
        }
    }
    const auto m = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::size_t s = states[static_cast<std::size_t>(i)];
        h(i, i) = h0 * (std::popcount(s) - 0.5 * n);
        for (int j = 0; j < n; ++j) {
            const std::size_t mask = (std::size_t{1} << j) | (std::size_t{1} << ((j + 1) % n));
            h(position[s ^ mask], i) -= 0.5;
        }
    }
    return h;
}

// Lowest state of the even-parity (even number of up spins) sector.
inline DenseChainState ed_ground_state(int n, double h0, double* energy = nullptr)
{
    detail::check_ed_size(n, 12);
    std::vector<std::size_t> states;
    const Eigen::MatrixXd h = ed_even_hamiltonian(n, h0, states);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    DenseChainState out;
    out.n_sites = n;
    out.h0 = h0;
    out.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.amplitudes(static_cast<Eigen::Index>(states[i])) =
            es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
    }
    if (energy != nullptr) {
        *energy = es.eigenvalues()(0);
    }
    return out;
}

// Free-fermion ground-state energy -sum_{k>0} eps_k on the antiperiodic grid.
inline double free_fermion_ground_energy(int n, double h0)
{
    double e = 0.0;
    for (const double k : build_grid(n).momenta) {
        e -= mode_coefficients(h0, k).eps_k;
    }
    return e;
}

// Ramp evolution from state.t to t_end (default: end of the protocol).
inline DenseChainState ed_evolve(const DenseChainState& state, const QuenchProtocol& protocol,
                                 double dt, double t_end = std::nan(""))
{
    detail::check_ed_size(state.n_sites, 10);
    protocol.validate();
    if (!(dt > 0.0)) {
        throw ConfigError("time step must be positive");
    }
    if (std::isnan(t_end)) {
        t_end = protocol.end_time();
    }
    const int n = state.n_sites;
    const Eigen::VectorXd sz = detail::sz_diagonal(n);
    DenseChainState out = state;
    const double span = t_end - state.t;
    if (span <= 0.0) {
        return out;
    }
    const auto steps = static_cast<std::int64_t>(std::ceil(span / dt));
    const double h = span / static_cast<double>(steps);
    for (std::int64_t i = 0; i < steps; ++i) {
        const double t = state.t + static_cast<double>(i) * h;
        detail::chain_exponential(n, protocol.field(t + h / 6.0), sz, 0.5 * h, out.amplitudes);
        detail::chain_exponential(n, protocol.field(t + 5.0 * h / 6.0), sz, 0.5 * h,
                                  out.amplitudes);
    }
    out.t = t_end;
    out.h0 = protocol.field(t_end);
    return out;
}

// Partial trace onto sites (l, m), basis {uu, ud, du, dd}.
inline Mat4 ed_reduced_rho(const DenseChainState& state, int l, int m)
{
    const int n = state.n_sites;
    if (l < 0 || m < 0 || l >= n || m >= n || l == m) {
        throw ConfigError("site indices must be distinct and inside the chain");
    }
    Mat4 rho = Mat4::Zero();
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t bl = std::size_t{1} << l;
    const std::size_t bm = std::size_t{1} << m;
    auto index = [&](std::size_t s) {
        return 2 * static_cast<int>((s & bl) == 0) + static_cast<int>((s & bm) == 0);
    };
    for (std::size_t s = 0; s < dim; ++s) {
        if ((s & bl) != 0 || (s & bm) != 0) {
            continue;
        }
        // s has both spins down; enumerate the four local configurations
        const std::size_t local[4] = {s | bl | bm, s | bl, s | bm, s};
        for (const auto a : local) {
            for (const auto b : local) {
                rho(index(a), index(b)) += state.amplitudes(static_cast<Eigen::Index>(a)) *
                                           std::conj(state.amplitudes(static_cast<Eigen::Index>(b)));
            }
        }
    }
    return rho;
}

// Spin correlators <s^a_0 s^b_r> read off the two-site reduced state.
inline SpinCorrelatorSet ed_spin_correlators(const DenseChainState& state, int r)
{
    const Mat4 rho = ed_reduced_rho(state, 0, r);
    Eigen::Matrix2cd sx, sy, sz;
    sx << 0, 0.5, 0.5, 0;
    sy << 0, cplx(0, -0.5), cplx(0, 0.5), 0;
    sz << 0.5, 0, 0, -0.5;
    auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
        Mat4 out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        return out;
    };
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    auto expect = [&](const Mat4& op) { return (rho * op).trace(); };
    SpinCorrelatorSet s;
    s.r = r;
    const cplx xx = expect(kron(sx, sx));
    const cplx yy = expect(kron(sy, sy));
    const cplx zz = expect(kron(sz, sz));
    s.xx = xx.real();
    s.yy = yy.real();
    s.zz = zz.real();
    s.xy = expect(kron(sx, sy));
    s.yx = expect(kron(sy, sx));
    s.sz = expect(kron(sz, id)).real();
    s.imag_residue = std::max({std::abs(xx.imag()), std::abs(yy.imag()), std::abs(zz.imag())});
    return s;
}

inline double ed_concurrence(const DenseChainState& state, int r)
{
    return concurrence(ed_reduced_rho(state, 0, r)).c;
}

}  // namespace quenchlab
