#pragma once

// Transverse-field Ising chain in momentum space.
//
// Conventions (J = hbar = 1):
//   H = -sum_n (2 s^x_n s^x_{n+1} - h0(t) s^z_n),  periodic spins, even parity
//   c_k = N^{-1/2} sum_n e^{ikn} c_n,  k = (2j-1) pi / N  (antiperiodic fermions)
//
// Each pair (k, -k) lives in the two-state Fock space {|0>, c+_k c+_{-k}|0>}.
// In that basis the mode Hamiltonian is, up to a constant,
//   H_k = -h_k sigma_z + Delta_k sigma_y,   h_k = h0 - cos k,  Delta_k = sin k,
// whose eigenvectors are
//   |phi-> = ( cos th, -i sin th ),  energy -eps_k
//   |phi+> = (-i sin th,  cos th ),  energy +eps_k
// with tan(2 th) = Delta_k / h_k.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quenchlab/error.hpp"

namespace quenchlab {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double pi = std::numbers::pi;

struct ModeGrid {
    int n_sites = 0;
    std::vector<double> momenta;  // (2j-1) pi / N, j = 1..N/2

    [[nodiscard]] std::size_t size() const { return momenta.size(); }
};

inline ModeGrid build_grid(int n_sites)
{
    if (n_sites < 4 || n_sites % 2 != 0) {
        throw ConfigError("chain length must be even and >= 4, got N = " +
                          std::to_string(n_sites));
    }
    ModeGrid grid;
    grid.n_sites = n_sites;
    grid.momenta.reserve(static_cast<std::size_t>(n_sites / 2));
    for (int j = 1; j <= n_sites / 2; ++j) {
        grid.momenta.push_back((2.0 * j - 1.0) * pi / n_sites);
    }
    return grid;
}

// Linear ramp h0(t) = h_i + (t - t_i)/tau, run towards h_f.  A ramp with
// h_f < h_i runs downwards at the same rate.
struct QuenchProtocol {
    double h_initial = -30.0;
    double h_final = 30.0;
    double tau = 1.0;
    double t_initial = 0.0;

    void validate() const
    {
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw ConfigError("quench time scale tau must be positive");
        }
        if (h_final == h_initial) {
            throw ConfigError("ramp endpoints must differ (h_f == h_i)");
        }
    }
    [[nodiscard]] double direction() const { return h_final >= h_initial ? 1.0 : -1.0; }
    [[nodiscard]] double field(double t) const
    {
        return h_initial + direction() * (t - t_initial) / tau;
    }
    [[nodiscard]] double time_at(double h0) const
    {
        return t_initial + direction() * (h0 - h_initial) * tau;
    }
    [[nodiscard]] double end_time() const { return time_at(h_final); }
};

enum class NoiseKind { white, ornstein_uhlenbeck };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::white;
    double xi = 0.0;     // intensity: <eta(t) eta(t')> = xi^2 delta(t - t')
    double tau_n = 0.0;  // correlation time, Ornstein-Uhlenbeck only

    [[nodiscard]] bool silent() const { return xi == 0.0; }
    void validate() const
    {
        if (!(xi >= 0.0) || !std::isfinite(xi)) {
            throw ConfigError("noise intensity xi must be finite and >= 0");
        }
        if (kind == NoiseKind::ornstein_uhlenbeck && !(tau_n > 0.0)) {
            throw ConfigError("Ornstein-Uhlenbeck noise needs tau_n > 0");
        }
    }
};

struct ModeCoefficients {
    double h_k = 0.0;
    double delta_k = 0.0;
    double theta_k = 0.0;  // in (-pi/2, pi/2], continuous along a ramp
    double eps_k = 0.0;
};

inline ModeCoefficients mode_coefficients(double h0, double k)
{
    ModeCoefficients c;
    c.h_k = h0 - std::cos(k);
    c.delta_k = std::sin(k);
    c.eps_k = std::hypot(c.h_k, c.delta_k);
    // atan2 keeps the angle continuous through h_k = 0; Delta_k > 0 on the
    // grid, so 2 theta stays in (0, pi).
    c.theta_k = 0.5 * std::atan2(c.delta_k, c.h_k);
    return c;
}

// Mode Hamiltonian in the pair Fock basis (constant h_k dropped).
inline Mat2 mode_hamiltonian(double h0, double k)
{
    const auto c = mode_coefficients(h0, k);
    Mat2 h;
    h << cplx(-c.h_k, 0.0), cplx(0.0, -c.delta_k),
         cplx(0.0, c.delta_k), cplx(c.h_k, 0.0);
    return h;
}

// Columns |phi->, |phi+> of the instantaneous eigenbasis.
inline Mat2 eigenbasis(double theta)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Mat2 v;
    v << cplx(c, 0.0), cplx(0.0, -s),
         cplx(0.0, -s), cplx(c, 0.0);
    return v;
}

struct ModeState {
    Mat2 rho = Mat2::Zero();  // pair Fock basis
    double k = 0.0;
    double t = 0.0;

    [[nodiscard]] double trace() const { return rho.trace().real(); }
    [[nodiscard]] double purity() const { return (rho * rho).trace().real(); }
};

inline ModeState ground_state_density(double h0, double k, double t = 0.0)
{
    const auto c = mode_coefficients(h0, k);
    const Eigen::Vector2cd lower = eigenbasis(c.theta_k).col(0);
    return ModeState{lower * lower.adjoint(), k, t};
}

// 1/(tau eps_k): small means the mode follows its instantaneous ground state.
inline double adiabaticity_index(double tau, double eps_k)
{
    if (eps_k == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / (tau * eps_k);
}

}  // namespace quenchlab
