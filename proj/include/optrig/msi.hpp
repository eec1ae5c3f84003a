#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "optrig/params.hpp"

// Michelson-Sagnac interferometer as the generalized input mirror (GM) of
// the cavity: scattering amplitudes, the pure-dissipative operating point,
// and the mapping to the (eta, kappa0) of the abstract cavity model.

namespace optrig {

// Lossless beam splitter + partially transmitting end mirror M.
struct MsiParams {
    double t_bs = 0.0, r_bs = 0.0;  // beam-splitter amplitude coefficients
    double t = 0.0, r = 0.0;        // mirror-M amplitude coefficients
    double k = 0.0;                 // wave vector [1/m]
    double length = 0.0;            // beam splitter to end mirror [m]
    double phi_plus = M_PI;         // accumulated sum phase (e^{i phi+} = -1)
    double phi_minus = 0.0;         // accumulated difference phase
    double x0 = 0.0;                // operating-point offset [m]

    double delta_bs() const { return r_bs * r_bs - t_bs * t_bs; }

    void validate() const {
        const double e1 = std::abs(t_bs * t_bs + r_bs * r_bs - 1.0);
        const double e2 = std::abs(t * t + r * r - 1.0);
        if (e1 > 1e-12 || e2 > 1e-12)
            throw ConfigError("MsiParams: lossless-element invariant violated");
    }
};

// GM scattering amplitudes at the given phi_minus.
struct GmScattering {
    complex tt;        // transmittance
    complex rr_right;  // reflectivity seen from the cavity side
    complex rr_left;   // reflectivity seen from the input side
};

inline GmScattering gm_scattering(const MsiParams& msi) {
    msi.validate();
    const complex i(0.0, 1.0);
    const complex ephi = std::exp(i * msi.phi_plus);
    const double dbs = msi.delta_bs();
    const double cp = std::cos(msi.phi_minus);
    const double sp = std::sin(msi.phi_minus);
    GmScattering g;
    g.tt = ephi * (2.0 * msi.r * msi.r_bs * msi.t_bs * cp - msi.t * dbs);
    g.rr_right = msi.r * ephi *
                 (dbs * cp - i * sp + 2.0 * msi.t * msi.t_bs * msi.r_bs / msi.r);
    g.rr_left = -msi.r * ephi *
                (dbs * cp + i * sp + 2.0 * msi.t * msi.t_bs * msi.r_bs / msi.r);
    return g;
}

struct Phi0Solution {
    double cos_phi0 = 0.0;
    double principal = 0.0;  // arccos branch in [0, pi]
    double negative = 0.0;   // the mirrored branch
};

// Operating phase of the pure-dissipative point: cos(phi0) = -R Dbs/(2 T Tbs Rbs).
inline Phi0Solution solve_phi0(const MsiParams& msi) {
    msi.validate();
    const double den = 2.0 * msi.t * msi.t_bs * msi.r_bs;
    if (den == 0.0)
        throw DomainError("solve_phi0: requires T != 0 (and a working beam splitter)");
    Phi0Solution s;
    s.cos_phi0 = -msi.r * msi.delta_bs() / den;
    if (std::abs(s.cos_phi0) > 1.0)
        throw DomainError("solve_phi0: |R Delta_bs| > 2 T Tbs Rbs, pure dissipative coupling unreachable");
    s.principal = std::acos(s.cos_phi0);
    s.negative = -s.principal;
    return s;
}

// Designed generalized mirror mapped onto the cavity model.
struct GmDesign {
    MsiParams msi;           // at the operating point (phi_minus = phi0)
    double phi0 = 0.0;       // signed operating branch
    complex tt0;             // transmittance at the operating point
    double rr0_abs = 0.0;    // |R0|
    double eta = 0.0;        // dissipative coupling [1/m]
    double kappa0 = 0.0;     // |T0|^2 / tau [rad/s]
    double tau = 0.0;        // round-trip time 2L/c [s]
};

// Builds the GM from targets {|T0|^2, R^2}. Delta_bs sign selects which of
// T_bs/R_bs dominates; with e^{i phi+} = -1 and sign(sin phi0) = sign(Delta_bs)
// the relative transmittance derivative is +R|R0|/|T0| so eta comes out
// positive with the phi_minus = phi0 + 2kx orientation. Default Delta_bs < 0.
inline GmDesign design_gm(double t0_sq, double r_sq, double k, double length,
                          int delta_bs_sign = -1) {
    if (!(t0_sq > 0.0) || !(t0_sq < 1.0))
        throw ConfigError("design_gm: need 0 < |T0|^2 < 1 (and << 1 for high finesse)");
    if (!(r_sq > 0.0) || !(r_sq < 1.0)) throw ConfigError("design_gm: need 0 < R^2 < 1");
    if (!(k > 0.0) || !(length > 0.0)) throw ConfigError("design_gm: need k > 0 and L > 0");
    if (delta_bs_sign != 1 && delta_bs_sign != -1)
        throw ConfigError("design_gm: delta_bs_sign must be +1 or -1");

    GmDesign g;
    const double t = std::sqrt(1.0 - r_sq);
    const double r = std::sqrt(r_sq);
    const double t0_abs = std::sqrt(t0_sq);
    const double dbs = delta_bs_sign * t0_abs * t;  // |T0| = |Delta_bs| / T
    const double tbs_sq = 0.5 * (1.0 - dbs);
    const double rbs_sq = 0.5 * (1.0 + dbs);

    const double rr0_sq_num = 4.0 * tbs_sq * rbs_sq - r_sq;
    if (rr0_sq_num <= 0.0)
        throw DomainError("design_gm: infeasible targets, |R0|^2 < 0");

    g.msi.t_bs = std::sqrt(tbs_sq);
    g.msi.r_bs = std::sqrt(rbs_sq);
    g.msi.t = t;
    g.msi.r = r;
    g.msi.k = k;
    g.msi.length = length;
    g.msi.phi_plus = M_PI;

    const Phi0Solution s = solve_phi0(g.msi);
    g.phi0 = (delta_bs_sign < 0) ? s.negative : s.principal;
    g.msi.phi_minus = g.phi0;

    g.tt0 = gm_scattering(g.msi).tt;
    g.rr0_abs = std::sqrt(rr0_sq_num) / t;
    g.eta = 4.0 * k * r * g.rr0_abs / t0_abs;
    g.tau = 2.0 * length / c_light;
    g.kappa0 = std::norm(g.tt0) / g.tau;
    return g;
}

// GM transmittance with the mirror displaced by x from the operating point.
inline complex gm_transmittance_at(const GmDesign& g, double x) {
    MsiParams m = g.msi;
    m.phi_minus = g.phi0 + 2.0 * g.msi.k * x;
    return gm_scattering(m).tt;
}

// kappa(x) = |T(x)|^2 / tau; linearizes to kappa0 (1 + eta x).
inline double gm_kappa_at(const GmDesign& g, double x) {
    return std::norm(gm_transmittance_at(g, x)) / g.tau;
}

// Ponderomotive force on mirror M in the balanced-splitter regime:
// F = 2 hbar k R^2 (|A_n|^2 - |A_e|^2)/(..) = 4 hbar k R^2 Re(B_c B_in^*).
// (The cross-product of input and intracavity amplitudes: interferometric
// pressure.)
inline double radiation_force(complex b_c, complex b_in, double k, double r,
                              double hbar_value = hbar) {
    return 4.0 * hbar_value * k * r * r * std::real(b_c * std::conj(b_in));
}

}  // namespace optrig
