#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "optrig/params.hpp"
#include "optrig/quantum_noise.hpp"
#include "optrig/rigidity.hpp"
#include "optrig/sweep.hpp"

// Time-domain integrator of the linearized stochastic equations, used as an
// independent oracle for stability verdicts and spectra. The classical
// complex-noise surrogate reproduces the symmetrized vacuum spectra of the
// linear model.
//
// State z = (Re a, Im a, x, v), normalized units (kappa0 = m = hbar = 1):
//   da/dt = -(1/2 - i d) a - (eta A_in/2)(psi*/psi) x + a_in(t)
//   dv/dt = F_lp / m,  dx/dt = v
// with F_lp = eta [Im(A* a_in) - A_in Im(a)] and a_in = (n_a + i n_p)/sqrt(2),
// n_a, n_p independent unit-PSD white noises. The drift sign is fixed by the
// requirement that the closed-loop poles equal the quartic roots of the
// rigidity's characteristic polynomial (verified in the tests).

namespace optrig {

// Counter-based Philox-2x64-10; keyed by (seed, trajectory index) so
// ensembles parallelize reproducibly.
class Philox2x64 {
  public:
    Philox2x64(std::uint64_t seed, std::uint64_t stream)
        : key_(seed), ctr_hi_(stream) {}

    std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t index) const {
        std::uint64_t c0 = index, c1 = ctr_hi_, k = key_;
        for (int r = 0; r < 10; ++r) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(kMult) * c0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            c0 = hi ^ k ^ c1;
            c1 = lo;
            k += kWeyl;
        }
        return {c0, c1};
    }

    // two standard normals from one block (Box-Muller)
    std::pair<double, double> normal_pair(std::uint64_t index) const {
        const auto [a, b] = block(index);
        const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1p-53;
        const double u2 = (static_cast<double>(b >> 11) + 0.5) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

  private:
    static constexpr std::uint64_t kMult = 0xD2B74407B1CE6E93ULL;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
    std::uint64_t ctr_hi_;
};

struct SimConfig {
    double dt = 0.01;              // step [1/kappa0]
    double duration = 1e4;         // [1/kappa0]
    std::uint64_t seed = 1;
    int ensemble = 16;
    int record_stride = 100;
    double noise_scale = 1.0;      // multiplies the injected noise amplitude
    double discard_fraction = 0.2; // transient dropped from statistics

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("SimConfig: dt must be > 0");
        if (dt > 0.05) throw ConfigError("SimConfig: dt*kappa0 must be <= 0.05");
        if (ensemble < 1) throw ConfigError("SimConfig: ensemble must be >= 1");
        if (record_stride < 1) throw ConfigError("SimConfig: record_stride must be >= 1");
        if (!(duration > dt)) throw ConfigError("SimConfig: duration too short");
        if (!(discard_fraction >= 0.0 && discard_fraction < 1.0))
            throw ConfigError("SimConfig: discard_fraction must be in [0,1)");
    }
};

struct LinearSystem {
    Eigen::Matrix4d drift;                 // M
    Eigen::Matrix<double, 4, 2> noise_in;  // L (white-noise input map)
};

inline LinearSystem build_system(double d, double w0sq) {
    const complex psi(0.5, -d);
    const double eta_ain = std::sqrt(w0sq) * std::abs(psi) / 0.5;  // eta A_in
    const complex a_mean_eta = eta_ain / psi;                      // eta A
    const complex cx = -0.5 * eta_ain * std::conj(psi) / psi;      // x -> a drive

    LinearSystem s;
    s.drift << -0.5, -d, cx.real(), 0.0,
                d, -0.5, cx.imag(), 0.0,
                0.0, 0.0, 0.0, 1.0,
                0.0, -eta_ain, 0.0, 0.0;
    const double rt2 = std::sqrt(2.0);
    s.noise_in << 1.0 / rt2, 0.0,
                  0.0, 1.0 / rt2,
                  0.0, 0.0,
                  -a_mean_eta.imag() / rt2, a_mean_eta.real() / rt2;
    return s;
}

// Exact one-step discretization (Van Loan): z' = Phi z + B xi, xi ~ N(0, I4),
// with B B^T = int_0^dt e^{Ms} L L^T e^{M^T s} ds.
struct DiscreteStep {
    Eigen::Matrix4d phi;
    Eigen::Matrix4d noise;  // B
};

inline DiscreteStep discretize(const LinearSystem& s, double dt) {
    Eigen::Matrix<double, 8, 8> h = Eigen::Matrix<double, 8, 8>::Zero();
    h.topLeftCorner<4, 4>() = -s.drift;
    h.topRightCorner<4, 4>() = s.noise_in * s.noise_in.transpose();
    h.bottomRightCorner<4, 4>() = s.drift.transpose();
    const Eigen::Matrix<double, 8, 8> g = (h * dt).exp();
    DiscreteStep out;
    out.phi = g.bottomRightCorner<4, 4>().transpose();
    const Eigen::Matrix4d cov = out.phi * g.topRightCorner<4, 4>();
    // symmetric square root with eigenvalue clamping (cov may be singular)
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(
        0.5 * (cov + cov.transpose()));
    Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    out.noise = es.eigenvectors() * lam.asDiagonal();
    return out;
}

// Stationary covariance from the Lyapunov equation M S + S M^T = -L L^T.
inline Eigen::Matrix4d stationary_covariance(const LinearSystem& s) {
    const Eigen::Matrix4d q = s.noise_in * s.noise_in.transpose();
    Eigen::Matrix<double, 16, 16> a = Eigen::Matrix<double, 16, 16>::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                a(i + 4 * j, k + 4 * j) += s.drift(i, k);  // (I (x) M)
                a(i + 4 * j, i + 4 * k) += s.drift(j, k);  // (M (x) I)
            }
    Eigen::Matrix<double, 16, 1> rhs;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) rhs(i + 4 * j) = -q(i, j);
    const Eigen::Matrix<double, 16, 1> v = a.partialPivLu().solve(rhs);
    Eigen::Matrix4d sig;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) sig(i, j) = v(i + 4 * j);
    return sig;
}

struct Trajectory {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> v;
    std::vector<complex> a;
};

struct SimResult {
    std::vector<Trajectory> trajectories;  // record_stride-decimated
    double var_x = 0.0;    // stationary variance (transient discarded)
    double mean_x = 0.0;
    double growth_rate = 0.0;  // slope of log ensemble-RMS x(t) [kappa0]
    double sample_dt = 0.0;    // record_stride * dt
    std::uint64_t steps = 0;
};

namespace detail {

inline double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i]; sy += y[i]; stt += t[i] * t[i]; sty += t[i] * y[i];
    }
    const double den = n * stt - st * st;
    return den == 0.0 ? 0.0 : (n * sty - st * sy) / den;
}

}  // namespace detail

inline SimResult simulate(double d, double w0sq, const SimConfig& cfg) {
    cfg.validate();
    const LinearSystem sys = build_system(d, w0sq);
    const DiscreteStep step = discretize(sys, cfg.dt);
    // white noise has unit PSD: discrete-time variance already folded into B
    const Eigen::Matrix4d b = cfg.noise_scale * step.noise;

    const std::uint64_t nsteps = static_cast<std::uint64_t>(cfg.duration / cfg.dt);
    const std::uint64_t discard =
        static_cast<std::uint64_t>(cfg.discard_fraction * nsteps);

    SimResult result;
    result.steps = nsteps;
    result.sample_dt = cfg.record_stride * cfg.dt;
    result.trajectories.resize(cfg.ensemble);
    std::vector<double> sum(cfg.ensemble, 0.0), sumsq(cfg.ensemble, 0.0);
    std::vector<std::uint64_t> count(cfg.ensemble, 0);

    parallel_for(static_cast<std::size_t>(cfg.ensemble), [&](std::size_t ti) {
        const Philox2x64 rng(cfg.seed, ti);
        Eigen::Vector4d z = Eigen::Vector4d::Zero();
        Trajectory& tr = result.trajectories[ti];
        const std::uint64_t nrec = nsteps / cfg.record_stride + 1;
        tr.t.reserve(nrec); tr.x.reserve(nrec); tr.v.reserve(nrec); tr.a.reserve(nrec);
        Eigen::Vector4d xi;
        for (std::uint64_t i = 0; i < nsteps; ++i) {
            const auto [g1, g2] = rng.normal_pair(2 * i);
            const auto [g3, g4] = rng.normal_pair(2 * i + 1);
            xi << g1, g2, g3, g4;
            z = step.phi * z + b * xi;
            if ((i + 1) % static_cast<std::uint64_t>(cfg.record_stride) == 0) {
                tr.t.push_back((i + 1) * cfg.dt);
                tr.a.push_back(complex(z(0), z(1)));
                tr.x.push_back(z(2));
                tr.v.push_back(z(3));
            }
            if (i >= discard) {
                sum[ti] += z(2);
                sumsq[ti] += z(2) * z(2);
                ++count[ti];
            }
        }
    });

    double s = 0.0, ss = 0.0;
    std::uint64_t n = 0;
    for (int i = 0; i < cfg.ensemble; ++i) {
        s += sum[i]; ss += sumsq[i]; n += count[i];
    }
    if (n > 0) {
        result.mean_x = s / n;
        result.var_x = ss / n - result.mean_x * result.mean_x;
    }

    // growth rate: slope of log ensemble-RMS over the second half of the record
    if (!result.trajectories.empty() && !result.trajectories[0].t.empty()) {
        const std::size_t nrec = result.trajectories[0].t.size();
        std::vector<double> ts, logs;
        for (std::size_t k = nrec / 2; k < nrec; ++k) {
            double ms = 0.0;
            for (const auto& tr : result.trajectories) ms += tr.x[k] * tr.x[k];
            ms /= result.trajectories.size();
            if (ms > 0.0) {
                ts.push_back(result.trajectories[0].t[k]);
                logs.push_back(0.5 * std::log(ms));
            }
        }
        result.growth_rate = detail::fit_slope(ts, logs);
    }
    return result;
}

// Raw injected-noise samples (n_a channel scaled to unit PSD at the sim step),
// for periodogram self-calibration.
inline std::vector<double> noise_series(const SimConfig& cfg, std::uint64_t traj_index) {
    cfg.validate();
    const Philox2x64 rng(cfg.seed, traj_index);
    const std::uint64_t nsteps = static_cast<std::uint64_t>(cfg.duration / cfg.dt);
    std::vector<double> out;
    out.reserve(nsteps);
    const double scale = cfg.noise_scale / std::sqrt(cfg.dt);
    for (std::uint64_t i = 0; i < nsteps; ++i)
        out.push_back(scale * rng.normal_pair(2 * i).first);
    return out;
}

// Ensemble-averaged Welch periodogram (Hann window, 50% overlap), normalized
// to the double-sided PSD convention; the first discard_fraction of each
// record is dropped. Throws if no full segment fits.
inline SpectrumSeries periodogram(const std::vector<std::vector<double>>& records,
                                  double sample_dt, int segment,
                                  double discard_fraction = 0.2) {
    if (segment < 8) throw ConfigError("periodogram: segment too short");
    std::vector<double> window(segment);
    double wsq = 0.0;
    for (int i = 0; i < segment; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (segment - 1)));
        wsq += window[i] * window[i];
    }
    Eigen::FFT<double> fft;
    std::vector<double> psd(segment / 2 + 1, 0.0);
    std::size_t nseg = 0;
    std::vector<std::complex<double>> freq;
    std::vector<double> buf(segment);
    for (const auto& record : records) {
        const std::size_t start =
            static_cast<std::size_t>(discard_fraction * record.size());
        for (std::size_t s = start; s + segment <= record.size(); s += segment / 2) {
            for (int i = 0; i < segment; ++i) buf[i] = window[i] * record[s + i];
            fft.fwd(freq, buf);
            for (int k = 0; k <= segment / 2; ++k)
                psd[k] += sample_dt * std::norm(freq[k]) / wsq;
            ++nseg;
        }
    }
    if (nseg == 0) throw ConfigError("periodogram: record too short for one segment");
    SpectrumSeries out;
    out.unit = "x^2 per (rad/s), double-sided";
    for (int k = 0; k <= segment / 2; ++k) {
        out.omega.push_back(2.0 * M_PI * k / (segment * sample_dt));
        out.value.push_back(psd[k] / nseg);
    }
    return out;
}

inline SpectrumSeries periodogram_x(const SimResult& sim, int segment,
                                    double discard_fraction = 0.2) {
    std::vector<std::vector<double>> recs;
    recs.reserve(sim.trajectories.size());
    for (const auto& tr : sim.trajectories) recs.push_back(tr.x);
    return periodogram(recs, sim.sample_dt, segment, discard_fraction);
}

}  // namespace optrig
