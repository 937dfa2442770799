#pragma once

// Stochastic trajectory oracle: unitary evolution of one mode under
// h0(t) + eta(t), with eta held constant over each step, averaged over
// independent noise realizations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "quenchlab/error.hpp"
#include "quenchlab/model.hpp"
#include "quenchlab/parallel.hpp"

namespace quenchlab {

struct TrajectoryOptions {
    std::int64_t trajectories = 1000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
};

namespace detail {

inline constexpr int trajectory_lanes = 8;
using TLane = std::array<double, trajectory_lanes>;

inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5151u};
    return std::mt19937_64(seq);
}

// cos(phi) and sin(phi)/phi; series for |phi| <= 0.25, libm above.
inline void cos_sinc(double phi, double& c, double& sc)
{
    if (std::abs(phi) > 0.25) {
        c = std::cos(phi);
        sc = std::sin(phi) / phi;
        return;
    }
    const double p2 = phi * phi;
    c = 1.0 + p2 * (-1.0 / 2 + p2 * (1.0 / 24 + p2 * (-1.0 / 720 + p2 * (1.0 / 40320 + p2 * (-1.0 / 3628800 + p2 * (1.0 / 479001600))))));
    sc = 1.0 + p2 * (-1.0 / 6 + p2 * (1.0 / 120 + p2 * (-1.0 / 5040 + p2 * (1.0 / 362880 + p2 * (-1.0 / 39916800 + p2 * (1.0 / 6227020800.0))))));
}

// psi <- exp(-i dt b.sigma) psi with b = (0, delta, -hk); psi = (re0, im0, re1, im1).
inline void su2_step(double& re0, double& im0, double& re1, double& im1, double hk, double delta,
                     double dt)
{
    const double norm_b = std::sqrt(hk * hk + delta * delta);
    double c = 0.0;
    double sc = 0.0;
    cos_sinc(norm_b * dt, c, sc);
    const double s = sc * dt;
    // c - i s b.sigma,  b.sigma = [[-hk, -i delta], [i delta, hk]]
    const double n_re0 = c * re0 - s * hk * im0 - s * delta * re1;
    const double n_im0 = c * im0 + s * hk * re0 - s * delta * im1;
    const double n_re1 = s * delta * re0 + c * re1 + s * hk * im1;
    const double n_im1 = s * delta * im0 + c * im1 - s * hk * re1;
    re0 = n_re0;
    im0 = n_im0;
    re1 = n_re1;
    im1 = n_im1;
}

struct NoiseStream {
    std::mt19937_64 rng;
    std::normal_distribution<double> normal{0.0, 1.0};
    double eta = 0.0;  // current OU value
};

struct TrajectoryPlan {
    double cos_k;
    double sin_k;
    std::int64_t steps;
    double h;
    bool ou;
    double white_sd;
    double ou_sd;
    double ou_decay;
    double ou_kick;
    bool silent;
};

inline TrajectoryPlan plan_trajectories(double k, const QuenchProtocol& protocol,
                                        const NoiseSpec& noise, double t0, double t1, double dt)
{
    TrajectoryPlan p{};
    p.cos_k = std::cos(k);
    p.sin_k = std::sin(k);
    p.steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil((t1 - t0) / dt)));
    p.h = (t1 - t0) / static_cast<double>(p.steps);
    p.silent = noise.silent();
    p.ou = noise.kind == NoiseKind::ornstein_uhlenbeck;
    p.white_sd = noise.xi / std::sqrt(p.h);
    if (p.ou) {
        p.ou_sd = noise.xi / std::sqrt(2.0 * noise.tau_n);
        p.ou_decay = std::exp(-p.h / noise.tau_n);
        p.ou_kick = p.ou_sd * std::sqrt(1.0 - p.ou_decay * p.ou_decay);
    }
    return p;
}

inline double next_noise(const TrajectoryPlan& p, NoiseStream& s)
{
    if (p.silent) {
        return 0.0;
    }
    if (p.ou) {
        const double now = s.eta;
        s.eta = p.ou_decay * s.eta + p.ou_kick * s.normal(s.rng);
        return now;
    }
    return p.white_sd * s.normal(s.rng);
}

// Final pure states of trajectories [first, first + count), count <= lanes.
inline std::vector<Eigen::Vector2cd> run_trajectory_block(double k, const QuenchProtocol& protocol,
                                                          const NoiseSpec& noise, double t_end,
                                                          double dt, std::uint64_t seed,
                                                          std::uint64_t first, int count)
{
    const TrajectoryPlan p = plan_trajectories(k, protocol, noise, protocol.t_initial, t_end, dt);
    const Eigen::Vector2cd psi0 =
        eigenbasis(mode_coefficients(protocol.h_initial, k).theta_k).col(0);
    std::vector<NoiseStream> streams;
    streams.reserve(static_cast<std::size_t>(count));
    for (int l = 0; l < count; ++l) {
        streams.push_back({trajectory_rng(seed, first + static_cast<std::uint64_t>(l))});
        if (p.ou && !p.silent) {
            streams.back().eta = p.ou_sd * streams.back().normal(streams.back().rng);
        }
    }
    TLane re0, im0, re1, im1, hk{};
    re0.fill(psi0(0).real());
    im0.fill(psi0(0).imag());
    re1.fill(psi0(1).real());
    im1.fill(psi0(1).imag());
    for (std::int64_t n = 0; n < p.steps; ++n) {
        const double t_mid = protocol.t_initial + (static_cast<double>(n) + 0.5) * p.h;
        const double base = protocol.field(t_mid) - p.cos_k;
        for (int l = 0; l < count; ++l) {
            hk[static_cast<std::size_t>(l)] = base + next_noise(p, streams[static_cast<std::size_t>(l)]);
        }
        for (std::size_t l = 0; l < trajectory_lanes; ++l) {
            su2_step(re0[l], im0[l], re1[l], im1[l], hk[l], p.sin_k, p.h);
        }
    }
    std::vector<Eigen::Vector2cd> out;
    for (std::size_t l = 0; l < static_cast<std::size_t>(count); ++l) {
        out.emplace_back(cplx(re0[l], im0[l]), cplx(re1[l], im1[l]));
    }
    return out;
}

}  // namespace detail

struct TrajectoryAverage {
    ModeState state;
    std::int64_t trajectories = 0;
    // standard error of the mean, expressed as a trace distance
    double sampling_error = 0.0;
};

// Running ensemble averages after the first counts[i] trajectories (counts
// ascending).  Trajectory j always draws from stream (seed, j), so a prefix
// average equals the average of a smaller run with the same seed.
inline std::vector<TrajectoryAverage> trajectory_ensemble(double k, const QuenchProtocol& protocol,
                                                  const NoiseSpec& noise, double t_end,
                                                  std::span<const std::int64_t> counts,
                                                  double dt, std::uint64_t seed,
                                                  unsigned threads = 1)
{
    protocol.validate();
    noise.validate();
    if (counts.empty() || counts.front() < 1 || !std::is_sorted(counts.begin(), counts.end())) {
        throw ConfigError("trajectory count must be >= 1");
    }
    if (!(dt > 0.0)) {
        throw ConfigError("trajectory time step must be positive");
    }
    if (t_end < protocol.t_initial) {
        throw ConfigError("t_end precedes the start of the ramp");
    }
    if (!(k > 0.0 && k < pi)) {
        throw ConfigError("momentum must lie in (0, pi)");
    }
    const auto total = static_cast<std::uint64_t>(counts.back());
    const std::uint64_t lanes = detail::trajectory_lanes;
    const std::uint64_t blocks = (total + lanes - 1) / lanes;
    const auto finals = parallel_map<std::vector<Eigen::Vector2cd>>(
        static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
            const std::uint64_t first = b * lanes;
            const auto count = static_cast<int>(std::min(lanes, total - first));
            return detail::run_trajectory_block(k, protocol, noise, t_end, dt, seed, first, count);
        });

    std::vector<TrajectoryAverage> out;
    Mat2 acc = Mat2::Zero();
    double acc_sq = 0.0;  // sum of squared Frobenius norms
    std::uint64_t done = 0;
    for (const auto m : counts) {
        for (; done < static_cast<std::uint64_t>(m); ++done) {
            const auto& psi = finals[done / lanes][done % lanes];
            const Mat2 rho = psi * psi.adjoint();
            acc += rho;
            acc_sq += rho.squaredNorm();
        }
        const auto md = static_cast<double>(m);
        const Mat2 mean = acc / md;
        const double var = std::max(0.0, acc_sq / md - mean.squaredNorm());
        // a traceless 2x2 Hermitian matrix has trace norm / 2 = Frobenius / sqrt(2)
        const double se = m > 1 ? std::sqrt(var / (md - 1.0) / 2.0) : 0.0;
        out.push_back(TrajectoryAverage{ModeState{mean, k, t_end}, m, se});
    }
    return out;
}

inline ModeState trajectory_oracle(double k, const QuenchProtocol& protocol,
                                   const NoiseSpec& noise, double t_end,
                                   const TrajectoryOptions& opts, unsigned threads = 1)
{
    if (opts.trajectories < 1) {
        throw ConfigError("trajectory count must be >= 1");
    }
    const std::int64_t counts[] = {opts.trajectories};
    return trajectory_ensemble(k, protocol, noise, t_end, counts, opts.dt, opts.seed, threads)
        .front()
        .state;
}

// One realization (stream index) sampled at the checkpoints.
inline std::vector<ModeState> trajectory_path(double k, const QuenchProtocol& protocol,
                                              const NoiseSpec& noise,
                                              std::span<const double> checkpoints, double dt,
                                              std::uint64_t seed, std::uint64_t index = 0)
{
    protocol.validate();
    noise.validate();
    if (!(dt > 0.0)) {
        throw ConfigError("trajectory time step must be positive");
    }
    const Eigen::Vector2cd psi0 =
        eigenbasis(mode_coefficients(protocol.h_initial, k).theta_k).col(0);
    double re0 = psi0(0).real(), im0 = psi0(0).imag(), re1 = psi0(1).real(), im1 = psi0(1).imag();
    detail::NoiseStream stream{detail::trajectory_rng(seed, index)};
    std::vector<ModeState> out;
    double t = protocol.t_initial;
    bool first = true;
    for (const double tc : checkpoints) {
        if (tc < t) {
            throw ConfigError("checkpoint times must be sorted and not precede t_i");
        }
        const auto p = detail::plan_trajectories(k, protocol, noise, t, tc, dt);
        if (first && p.ou && !p.silent) {
            stream.eta = p.ou_sd * stream.normal(stream.rng);
        }
        first = false;
        for (std::int64_t n = 0; n < p.steps && tc > t; ++n) {
            const double t_mid = t + (static_cast<double>(n) + 0.5) * p.h;
            const double hk = protocol.field(t_mid) - p.cos_k + detail::next_noise(p, stream);
            detail::su2_step(re0, im0, re1, im1, hk, p.sin_k, p.h);
        }
        t = tc;
        const Eigen::Vector2cd psi(cplx(re0, im0), cplx(re1, im1));
        out.push_back(ModeState{psi * psi.adjoint(), k, tc});
    }
    return out;
}

}  // namespace quenchlab
