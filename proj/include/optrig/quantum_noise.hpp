#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "optrig/params.hpp"
#include "optrig/rigidity.hpp"

// Fluctuational radiation-pressure force spectrum, driven displacement
// spectrum, and the equilibrium occupation of the rigidity-created
// oscillator.
//
// PSD convention (frozen): double-sided, symmetrized, unit white spectra for
// the input quadratures a_a and a_p, integrals over dOmega/2pi.

namespace optrig {

// F_fl = c_a a_a + c_p a_p. Normalized units: hbar = m = kappa0 = 1, where
// eta*A_in = w0 |psi| / (kappa0/2).
struct ForceTransfer {
    double omega = 0.0;
    complex c_a, c_p;
};

inline ForceTransfer force_transfer_normalized(double d, double w0sq, double w) {
    const ResponseKernel k = response_kernel_normalized(d, w);
    const double eta_ain = std::sqrt(w0sq) * std::abs(k.psi) / 0.5;
    ForceTransfer f;
    f.omega = w;
    f.c_a = -std::sqrt(2.0) * eta_ain * (k.g_minus + k.j_minus);
    f.c_p = std::sqrt(2.0) * eta_ain * (k.g_plus - k.j_plus);
    return f;
}

// S_Ffl = 2 w0sq ((1/4 + d^2)/(1/4)) {|g-+j-|^2 + |g+-j+|^2}; equals
// |c_a|^2 + |c_p|^2 under the unit-quadrature convention.
inline double s_ffl_normalized(double d, double w0sq, double w) {
    const ResponseKernel k = response_kernel_normalized(d, w);
    const double num = std::norm(k.g_minus + k.j_minus) + std::norm(k.g_plus - k.j_plus);
    return 2.0 * w0sq * (std::norm(k.psi) / 0.25) * num;
}

// S_Ffl in SI units [N^2 s].
inline double s_ffl(const PhysicalParams& p, double omega) {
    const NormalizedParams n = normalize(p);
    return hbar * p.m * p.kappa0 * p.kappa0 *
           s_ffl_normalized(n.d, n.w0sq, omega / p.kappa0);
}

// S_x = S_Ffl / |m Omega^2 - K|^2. Finite at w = 0 whenever K(0) != 0.
inline double displacement_spectrum_normalized(double d, double w0sq, double w) {
    const complex k = rigidity(d, w0sq, w);
    const double den = std::norm(w * w - k);
    if (den == 0.0)
        throw DomainError("displacement_spectrum: exact pole at Omega = " + std::to_string(w));
    return s_ffl_normalized(d, w0sq, w) / den;
}

// S_x in SI units [m^2 s].
inline double displacement_spectrum(const PhysicalParams& p, double omega) {
    const NormalizedParams n = normalize(p);
    return (hbar / (p.m * p.kappa0 * p.kappa0)) *
           displacement_spectrum_normalized(n.d, n.w0sq, omega / p.kappa0);
}

// Ordered (Omega, value) samples of a double-sided symmetrized PSD.
struct SpectrumSeries {
    std::vector<double> omega;
    std::vector<double> value;
    std::string unit;  // tag: "dimensionless", "m^2 s", "N^2 s", ...
};

// --- adaptive Gauss-Kronrod (G7, K15) quadrature ------------------------

namespace detail {

inline constexpr double gk_nodes[8] = {
    0.0, 0.207784955007898468, 0.405845151377397167, 0.586087235467691130,
    0.741531185599394440, 0.864864423359769073, 0.949107912342758525,
    0.991455371120812639};
inline constexpr double gk_wk[8] = {
    0.209482141084727828, 0.204432940075298892, 0.190350578064785410,
    0.169004726639267903, 0.140653259715525919, 0.104790010322250184,
    0.063092092629978553, 0.022935322010529225};
inline constexpr double gk_wg[4] = {
    0.417959183673469388, 0.381830050505118945, 0.279705391489276668,
    0.129484966168869693};

struct Interval {
    double a, b, integral, error;
};

template <typename Fn>
Interval gk15(const Fn& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double fc = f(mid);
    double k = gk_wk[0] * fc;
    double g = gk_wg[0] * fc;
    for (int i = 1; i < 8; ++i) {
        const double x = h * gk_nodes[i];
        const double fs = f(mid - x) + f(mid + x);
        k += gk_wk[i] * fs;
        if (i % 2 == 0) g += gk_wg[i / 2] * fs;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Globally adaptive GK15 over [a, b] with optional interior breakpoints.
inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                           double a, double b,
                                           std::vector<double> breakpoints = {},
                                           double rel_tol = 1e-4,
                                           int max_intervals = 4000) {
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<detail::Interval> heap;
    QuadratureResult r;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = std::clamp(breakpoints[i], a, b);
        const double hi = std::clamp(breakpoints[i + 1], a, b);
        if (hi <= lo) continue;
        heap.push_back(detail::gk15(f, lo, hi));
        r.evaluations += 15;
    }
    auto total = [&] {
        double v = 0.0, e = 0.0;
        for (const auto& iv : heap) { v += iv.integral; e += iv.error; }
        return std::pair<double, double>(v, e);
    };
    for (;;) {
        auto [v, e] = total();
        r.value = v;
        r.error = e;
        if (e <= rel_tol * std::abs(v) || static_cast<int>(heap.size()) >= max_intervals) {
            r.converged = e <= rel_tol * std::abs(v);
            return r;
        }
        std::size_t worst = 0;
        for (std::size_t i = 1; i < heap.size(); ++i)
            if (heap[i].error > heap[worst].error) worst = i;
        const detail::Interval iv = heap[worst];
        const double mid = 0.5 * (iv.a + iv.b);
        heap[worst] = detail::gk15(f, iv.a, mid);
        heap.push_back(detail::gk15(f, mid, iv.b));
        r.evaluations += 30;
    }
}

struct NeffResult {
    double n_eff = 0.0;
    double x_sq = 0.0;           // <x^2>, normalized units
    double omega_m = 0.0;
    double cutoff = 0.0;         // [kappa0]
    double n_eff_doubled = 0.0;  // same with the cutoff doubled
    double cutoff_change = 0.0;  // |n2 - n1| / n1
};

// <x^2> = int S_x dOmega/2pi over (-inf, inf), by evenness 2/(2pi) int_0^cut.
inline double mean_x_sq_normalized(double d, double w0sq, double cutoff = 1e3,
                                   double rel_tol = 1e-4) {
    const EffectiveOscillator o = effective_oscillator_normalized(d, w0sq);
    std::vector<double> brk;
    for (double k : {-30.0, -5.0, 5.0, 30.0}) {
        const double p = o.omega_m + k * o.delta_m;
        if (p > 0.0 && p < cutoff) brk.push_back(p);
    }
    for (double p : {0.5 * o.omega_m, 2.0 * o.omega_m, 1.0, 10.0, 100.0})
        if (p > 0.0 && p < cutoff) brk.push_back(p);
    auto f = [&](double w) { return displacement_spectrum_normalized(d, w0sq, w); };
    const QuadratureResult q = integrate_adaptive(f, 0.0, cutoff, brk, rel_tol);
    if (!q.converged)
        throw DomainError("mean_x_sq: quadrature failed to converge");
    return q.value / M_PI;
}

// n_eff = m Omega_m^2 <x^2> / (hbar Omega_m); dimensionless and invariant
// under unit rescaling, so it is computed in normalized units only.
inline NeffResult n_eff_normalized(double d, double w0sq, double cutoff = 1e3) {
    const StabilityVerdict sv = is_stable_normalized(d, w0sq);
    if (sv.verdict != Verdict::Stable)
        throw DomainError("n_eff: system is not strictly stable; <x^2> diverges");
    NeffResult r;
    const EffectiveOscillator o = effective_oscillator_normalized(d, w0sq);
    r.omega_m = o.omega_m;
    r.cutoff = cutoff;
    r.x_sq = mean_x_sq_normalized(d, w0sq, cutoff);
    r.n_eff = o.omega_m * r.x_sq;
    r.n_eff_doubled = o.omega_m * mean_x_sq_normalized(d, w0sq, 2.0 * cutoff);
    r.cutoff_change = std::abs(r.n_eff_doubled - r.n_eff) / r.n_eff;
    return r;
}

inline NeffResult n_eff(const PhysicalParams& p, double cutoff = 1e3) {
    const NormalizedParams n = normalize(p);
    return n_eff_normalized(n.d, n.w0sq, cutoff);
}

}  // namespace optrig
