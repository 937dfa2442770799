#pragma once

// Per-mode ramp dynamics.
//
// The 2x2 mode density matrix is integrated in the fixed pair Fock basis as a
// Bloch vector r, rho = (1 + r.sigma)/2.  With H_k = b.sigma,
// b = (0, Delta_k, -h_k), the averaged white-noise master equation
//   drho/dt = -i[H_k, rho] - (xi^2/2)[sigma_z, [sigma_z, rho]]
// becomes the linear system
//   dr/dt = 2 b x r - 2 xi^2 (x, y, 0)
// which preserves the trace exactly.
//
// Modes are advanced in fixed blocks of `block_lanes` momenta with a step size
// that does not depend on k, so each mode's trajectory is the same whatever
// block, thread or batch it is computed in.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quenchlab/error.hpp"
#include "quenchlab/model.hpp"
#include "quenchlab/parallel.hpp"

namespace quenchlab {

enum class Integrator {
    magnus4,  // 4th-order Magnus, one exact exponential per step
    cf4,      // commutator-free 4th-order Magnus, two exponentials per step
    rk4,      // classical Runge-Kutta on the Bloch system
};

// Step policy, with E = |h0| + 1 bounding eps_k on the segment:
//   dt = min(dt_max, field_step tau, safety sqrt(tau / E), max_phase / E)
// with max_phase divided by 8 for rk4, whose phase error is not exact on the
// static part.  The sqrt(tau / E) rule keeps the step-halving change near 5e-9
// for 3 <= tau <= 1000 on the reference ramp.
// field_step tau caps the change of h0 per step at 2 field_step, which is what
// limits accuracy for fast ramps.
struct IntegratorParams {
    double dt_max = 0.25;
    double safety = 0.0125;
    double max_phase = 2.0;
    double field_step = 0.05;
    Integrator method = Integrator::magnus4;

    void validate() const
    {
        if (!(dt_max > 0.0)) {
            throw ConfigError("integrator dt_max must be positive");
        }
        if (!(safety > 0.0)) {
            throw ConfigError("integrator safety factor must be positive");
        }
        if (!(max_phase > 0.0)) {
            throw ConfigError("integrator max_phase must be positive");
        }
        if (!(field_step > 0.0)) {
            throw ConfigError("integrator field_step must be positive");
        }
    }

    // Every step-size limit halved.
    [[nodiscard]] IntegratorParams halved() const
    {
        return {0.5 * dt_max, 0.5 * safety, 0.5 * max_phase, 0.5 * field_step, method};
    }
};

struct DiagonalModeState {
    double d11 = 1.0;  // <phi-|rho|phi->
    double d22 = 0.0;  // <phi+|rho|phi+>
    cplx d12{};        // <phi-|rho|phi+>
    double theta = 0.0;
    double k = 0.0;
    double t = 0.0;

    [[nodiscard]] cplx d21() const { return std::conj(d12); }
    [[nodiscard]] double purity() const
    {
        return d11 * d11 + d22 * d22 + 2.0 * std::norm(d12);
    }
};

// All modes of one chain at one instant.
struct ModeSnapshot {
    int n_sites = 0;
    double t = 0.0;
    double h0 = 0.0;
    std::vector<DiagonalModeState> modes;
    int clamp_count = 0;  // populations in (-1e-9, 0) set to zero on readout
};

namespace detail {

inline constexpr int block_lanes = 8;
using Lane = std::array<double, block_lanes>;

struct BlochBlock {
    Lane x{}, y{}, z{};
    Lane cos_k{}, sin_k{};
};

inline std::array<double, 3> to_bloch(const Mat2& rho)
{
    return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

inline Mat2 from_bloch(double x, double y, double z)
{
    Mat2 rho;
    rho << cplx(0.5 * (1.0 + z), 0.0), cplx(0.5 * x, -0.5 * y),
           cplx(0.5 * x, 0.5 * y), cplx(0.5 * (1.0 - z), 0.0);
    return rho;
}

// Smallest n with a^n / n! < 1e-17.
inline int taylor_terms(double a)
{
    double bound = 1.0;
    int n = 0;
    while (bound >= 1e-17 && n < 200) {
        ++n;
        bound *= a / n;
    }
    return n;
}

// r <- exp(s (2 [b]x - gamma P)) r lane by lane, P = diag(1, 1, 0).  `a`
// bounds s ||2 [b]x - gamma P|| over all lanes.
inline void block_exponential(BlochBlock& blk, const Lane& bx, const Lane& by, const Lane& bz,
                              double gamma, double s, double a)
{
    const int terms = taylor_terms(a);
    Lane tx = blk.x, ty = blk.y, tz = blk.z;
    for (int n = 1; n <= terms; ++n) {
        const double f = s / n;
        const double g = f * gamma;
        for (int l = 0; l < block_lanes; ++l) {
            const double nx = 2.0 * f * (by[l] * tz[l] - bz[l] * ty[l]) - g * tx[l];
            const double ny = 2.0 * f * (bz[l] * tx[l] - bx[l] * tz[l]) - g * ty[l];
            const double nz = 2.0 * f * (bx[l] * ty[l] - by[l] * tx[l]);
            tx[l] = nx;
            ty[l] = ny;
            tz[l] = nz;
            blk.x[l] += nx;
            blk.y[l] += ny;
            blk.z[l] += nz;
        }
    }
}

class BlockIntegrator {
public:
    BlockIntegrator(const QuenchProtocol& protocol, double gamma, const IntegratorParams& params)
        : protocol_(protocol), gamma_(gamma), params_(params)
    {
    }

    // Largest step on [t0, t1]; |h0| is convex in t, so its maximum on a
    // segment sits at an endpoint.
    [[nodiscard]] double step_bound(double t0, double t1) const
    {
        const double e =
            std::max(std::abs(protocol_.field(t0)), std::abs(protocol_.field(t1))) + 1.0;
        const double dt = std::min(params_.dt_max, params_.field_step * protocol_.tau);
        const double phase = params_.method == Integrator::rk4 ? params_.max_phase / 8.0
                                                               : params_.max_phase;
        return std::min({dt, params_.safety * std::sqrt(protocol_.tau / e), phase / e});
    }

    // Integrates from t0 to t1 in segments spanning at most one unit of field.
    void advance(BlochBlock& blk, double t0, double t1) const
    {
        double t = t0;
        while (t < t1) {
            const double t_next = std::min(t1, t + protocol_.tau);
            const double len = t_next - t;
            const auto n = static_cast<std::int64_t>(std::ceil(len / step_bound(t, t_next)));
            const double dt = len / static_cast<double>(n);
            for (std::int64_t i = 0; i < n; ++i) {
                step(blk, t + static_cast<double>(i) * dt, dt);
            }
            t = t_next;
        }
    }

private:
    void exponential(BlochBlock& blk, const Lane& bx, double h, double s, double tilt) const
    {
        Lane bz;
        for (int l = 0; l < block_lanes; ++l) {
            bz[l] = blk.cos_k[l] - h;
        }
        // |b|^2 <= tilt^2 + (|h| + 1)^2 for every k
        const double e = std::abs(h) + 1.0;
        const double a = s * (2.0 * std::sqrt(e * e + tilt * tilt) + gamma_);
        block_exponential(blk, bx, blk.sin_k, bz, gamma_, s, a);
    }

    void step(BlochBlock& blk, double t, double dt) const
    {
        switch (params_.method) {
        case Integrator::magnus4: {
            // Omega = dt A(t_mid) + dt^3/12 [A', A(t_mid)]; the commutator of
            // the field derivative with the dephasing term vanishes, so Omega
            // keeps the same form with b tilted along x.
            const double tilt = protocol_.direction() * dt * dt / (6.0 * protocol_.tau);
            Lane bx;
            for (int l = 0; l < block_lanes; ++l) {
                bx[l] = tilt * blk.sin_k[l];
            }
            exponential(blk, bx, protocol_.field(t + 0.5 * dt), dt, tilt);
            return;
        }
        case Integrator::cf4: {
            // for an affine generator the two Gauss-node combinations reduce
            // to single evaluations at t + dt/6 and t + 5dt/6
            const Lane zero{};
            exponential(blk, zero, protocol_.field(t + dt / 6.0), 0.5 * dt, 0.0);
            exponential(blk, zero, protocol_.field(t + 5.0 * dt / 6.0), 0.5 * dt, 0.0);
            return;
        }
        case Integrator::rk4:
            rk4_step(blk, t, dt);
            return;
        }
    }

    void derivative(const BlochBlock& blk, const std::array<Lane, 3>& r, double h,
                    std::array<Lane, 3>& dr) const
    {
        for (int l = 0; l < block_lanes; ++l) {
            const double hk = h - blk.cos_k[l];
            const double d = blk.sin_k[l];
            dr[0][l] = 2.0 * hk * r[1][l] + 2.0 * d * r[2][l] - gamma_ * r[0][l];
            dr[1][l] = -2.0 * hk * r[0][l] - gamma_ * r[1][l];
            dr[2][l] = -2.0 * d * r[0][l];
        }
    }

    void rk4_step(BlochBlock& blk, double t, double dt) const
    {
        const std::array<Lane, 3> r0{blk.x, blk.y, blk.z};
        std::array<Lane, 3> k1, k2, k3, k4, tmp;
        auto stage = [&](const std::array<Lane, 3>& kk, double c) {
            for (int i = 0; i < 3; ++i) {
                for (int l = 0; l < block_lanes; ++l) {
                    tmp[i][l] = r0[i][l] + c * kk[i][l];
                }
            }
        };
        const double hm = protocol_.field(t + 0.5 * dt);
        derivative(blk, r0, protocol_.field(t), k1);
        stage(k1, 0.5 * dt);
        derivative(blk, tmp, hm, k2);
        stage(k2, 0.5 * dt);
        derivative(blk, tmp, hm, k3);
        stage(k3, dt);
        derivative(blk, tmp, protocol_.field(t + dt), k4);
        std::array<Lane*, 3> out{&blk.x, &blk.y, &blk.z};
        for (int i = 0; i < 3; ++i) {
            for (int l = 0; l < block_lanes; ++l) {
                (*out[i])[l] += dt / 6.0 * (k1[i][l] + 2.0 * k2[i][l] + 2.0 * k3[i][l] + k4[i][l]);
            }
        }
    }

    QuenchProtocol protocol_;
    double gamma_;
    IntegratorParams params_;
};

inline void check_white(const NoiseSpec& noise)
{
    noise.validate();
    if (noise.kind != NoiseKind::white && !noise.silent()) {
        throw ConfigError(
            "the averaged master equation is exact only for white noise; "
            "use the trajectory oracle for Ornstein-Uhlenbeck noise");
    }
}

inline void check_checkpoints(const QuenchProtocol& protocol, std::span<const double> checkpoints)
{
    double t = protocol.t_initial;
    for (const double tc : checkpoints) {
        if (!(tc >= t) || !std::isfinite(tc)) {
            throw ConfigError("checkpoint times must be sorted and not precede t_i");
        }
        t = tc;
    }
}

// Evolves up to block_lanes momenta; result[c][i] is mode i at checkpoint c.
inline std::vector<std::vector<ModeState>> evolve_block(std::span<const double> momenta,
                                                        const QuenchProtocol& protocol,
                                                        double gamma,
                                                        std::span<const double> checkpoints,
                                                        const IntegratorParams& params)
{
    BlochBlock blk;
    // padding lanes repeat the last momentum
    for (std::size_t l = 0; l < block_lanes; ++l) {
        const double k = momenta[std::min(l, momenta.size() - 1)];
        blk.cos_k[l] = std::cos(k);
        blk.sin_k[l] = std::sin(k);
        const auto r = to_bloch(ground_state_density(protocol.h_initial, k).rho);
        blk.x[l] = r[0];
        blk.y[l] = r[1];
        blk.z[l] = r[2];
    }
    const BlockIntegrator integ(protocol, gamma, params);
    std::vector<std::vector<ModeState>> out;
    out.reserve(checkpoints.size());
    double t = protocol.t_initial;
    for (const double tc : checkpoints) {
        integ.advance(blk, t, tc);
        t = tc;
        std::vector<ModeState> states;
        for (std::size_t i = 0; i < momenta.size(); ++i) {
            states.push_back(ModeState{from_bloch(blk.x[i], blk.y[i], blk.z[i]), momenta[i], tc});
        }
        out.push_back(std::move(states));
    }
    return out;
}

}  // namespace detail

// States of mode k at each (sorted, >= t_i) checkpoint time.
inline std::vector<ModeState> evolve_mode_path(double k, const QuenchProtocol& protocol,
                                               const NoiseSpec& noise,
                                               std::span<const double> checkpoints,
                                               const IntegratorParams& params = {})
{
    protocol.validate();
    params.validate();
    detail::check_white(noise);
    detail::check_checkpoints(protocol, checkpoints);
    if (!(k > 0.0 && k < pi)) {
        throw ConfigError("momentum must lie in (0, pi)");
    }
    const double ks[] = {k};
    const auto per_time =
        detail::evolve_block(ks, protocol, 2.0 * noise.xi * noise.xi, checkpoints, params);
    std::vector<ModeState> out;
    for (const auto& states : per_time) {
        out.push_back(states.front());
    }
    return out;
}

inline ModeState evolve_mode(double k, const QuenchProtocol& protocol, const NoiseSpec& noise,
                             double t_end, const IntegratorParams& params = {})
{
    if (t_end < protocol.t_initial) {
        throw ConfigError("t_end precedes the start of the ramp");
    }
    const double ts[] = {t_end};
    return evolve_mode_path(k, protocol, noise, ts, params).front();
}

// rho^(d) = V^dagger rho V in the eigenbasis of H_k(h0).
inline DiagonalModeState to_diagonal_basis(const ModeState& state, double h0)
{
    const double theta = mode_coefficients(h0, state.k).theta_k;
    const Mat2 v = eigenbasis(theta);
    const Mat2 d = v.adjoint() * state.rho * v;
    return DiagonalModeState{d(0, 0).real(), d(1, 1).real(), d(0, 1), theta, state.k, state.t};
}

namespace detail {

inline void clamp_populations(DiagonalModeState& d, int& clamp_count)
{
    constexpr double tol = 1e-9;
    if (d.d11 < -tol || d.d22 < -tol) {
        throw NumericalError("negative mode population " +
                             std::to_string(std::min(d.d11, d.d22)) + " at k = " +
                             std::to_string(d.k) + ", t = " + std::to_string(d.t));
    }
    if (d.d11 < 0.0) {
        d.d11 = 0.0;
        d.d22 = 1.0;
        ++clamp_count;
    } else if (d.d22 < 0.0) {
        d.d22 = 0.0;
        d.d11 = 1.0;
        ++clamp_count;
    }
}

}  // namespace detail

// Snapshots of every mode at each checkpoint, read out in the instantaneous
// eigenbasis.
inline std::vector<ModeSnapshot> evolve_all_modes_path(const ModeGrid& grid,
                                                       const QuenchProtocol& protocol,
                                                       const NoiseSpec& noise,
                                                       std::span<const double> checkpoints,
                                                       const IntegratorParams& params = {},
                                                       unsigned threads = 1)
{
    protocol.validate();
    params.validate();
    detail::check_white(noise);
    detail::check_checkpoints(protocol, checkpoints);
    const double gamma = 2.0 * noise.xi * noise.xi;
    const std::size_t lanes = detail::block_lanes;
    const std::size_t blocks = (grid.size() + lanes - 1) / lanes;
    const auto per_block = parallel_map<std::vector<std::vector<ModeState>>>(
        blocks, threads, [&](std::size_t b) {
            const std::size_t first = b * lanes;
            const std::size_t count = std::min(lanes, grid.size() - first);
            return detail::evolve_block(std::span(grid.momenta).subspan(first, count), protocol,
                                        gamma, checkpoints, params);
        });
    std::vector<ModeSnapshot> out(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        auto& snap = out[c];
        snap.n_sites = grid.n_sites;
        snap.t = checkpoints[c];
        snap.h0 = protocol.field(checkpoints[c]);
        snap.modes.reserve(grid.size());
        for (const auto& block : per_block) {
            for (const auto& state : block[c]) {
                auto d = to_diagonal_basis(state, snap.h0);
                try {
                    detail::clamp_populations(d, snap.clamp_count);
                } catch (const NumericalError& e) {
                    throw NumericalError(std::string(e.what()) + " [N = " +
                                         std::to_string(grid.n_sites) + "]");
                }
                snap.modes.push_back(d);
            }
        }
    }
    return out;
}

inline ModeSnapshot evolve_all_modes(const ModeGrid& grid, const QuenchProtocol& protocol,
                                     const NoiseSpec& noise, double t_end,
                                     const IntegratorParams& params = {}, unsigned threads = 1)
{
    if (t_end < protocol.t_initial) {
        throw ConfigError("t_end precedes the start of the ramp");
    }
    const double ts[] = {t_end};
    return evolve_all_modes_path(grid, protocol, noise, ts, params, threads).front();
}

// Instantaneous ground state of every mode, in snapshot form.
inline ModeSnapshot ground_state_snapshot(const ModeGrid& grid, double h0)
{
    ModeSnapshot snap;
    snap.n_sites = grid.n_sites;
    snap.h0 = h0;
    snap.modes.reserve(grid.size());
    for (const double k : grid.momenta) {
        snap.modes.push_back({1.0, 0.0, cplx{}, mode_coefficients(h0, k).theta_k, k, 0.0});
    }
    return snap;
}

}  // namespace quenchlab
