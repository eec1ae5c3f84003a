#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "optrig/params.hpp"

// Optical rigidity K(Omega), its low-frequency series, the mechanical
// susceptibility, the effective oscillator created by the rigidity, and the
// exact stability classification (Routh-Hurwitz + quartic roots).
//
// Everything here is in normalized units (kappa0 = 1, m = 1) unless a
// PhysicalParams overload says otherwise.

namespace optrig {

// K(w) in units of m*kappa0^2:
//   K = -w0sq * d ((1/2)(3/2 - 2iw) - d^2) / ((1/2)((1/2 - iw)^2 + d^2))
inline complex rigidity(double d, double w0sq, double w) {
    const complex i(0.0, 1.0);
    const complex num = d * (0.5 * (1.5 - 2.0 * i * w) - d * d);
    const complex den = 0.5 * ((complex(0.5, -w) * complex(0.5, -w)) + d * d);
    return -w0sq * num / den;
}

struct Rigidity {
    double omega = 0.0;  // [rad/s]
    complex k;           // [N/m]
};

inline Rigidity rigidity(const PhysicalParams& p, double omega) {
    const NormalizedParams n = normalize(p);
    Rigidity r;
    r.omega = omega;
    r.k = p.m * p.kappa0 * p.kappa0 * rigidity(n.d, n.w0sq, omega / p.kappa0);
    return r;
}

// First two Taylor coefficients of K in powers of (-i Omega):
// K_m = k0 + k1 (-i Omega).
struct SeriesRigidity {
    double k0 = 0.0;  // static rigidity [N/m]
    double k1 = 0.0;  // viscosity [N s/m]
};

inline SeriesRigidity rigidity_series_normalized(double d, double w0sq) {
    const double c2 = 0.25;  // (kappa0/2)^2
    const double den = c2 + d * d;
    SeriesRigidity s;
    s.k0 = -w0sq * d * (3.0 * c2 - d * d) / (0.5 * den);
    s.k1 = -4.0 * w0sq * d * (d * d - c2) / (den * den);
    return s;
}

inline SeriesRigidity rigidity_series(const PhysicalParams& p) {
    const NormalizedParams n = normalize(p);
    SeriesRigidity s = rigidity_series_normalized(n.d, n.w0sq);
    s.k0 *= p.m * p.kappa0 * p.kappa0;
    s.k1 *= p.m * p.kappa0;
    return s;
}

// chi = m / (K - m Omega^2); the series variant replaces K by K_m.
// Returns infinity at an exact pole.
inline complex susceptibility(double d, double w0sq, double w, bool exact = true) {
    complex k;
    if (exact) {
        k = rigidity(d, w0sq, w);
    } else {
        const SeriesRigidity s = rigidity_series_normalized(d, w0sq);
        k = s.k0 + s.k1 * complex(0.0, -w);
    }
    const complex den = k - w * w;
    if (den == complex(0.0, 0.0))
        return complex(std::numeric_limits<double>::infinity(), 0.0);
    return 1.0 / den;
}

// Effective oscillator created by the rigidity acting on the free mass.
struct EffectiveOscillator {
    double omega_m = 0.0;  // eigenfrequency
    double delta_m = 0.0;  // relaxation rate
    double q_m = 0.0;      // Omega_m / (2 delta_m)
};

inline EffectiveOscillator effective_oscillator_normalized(double d, double w0sq) {
    if (d >= 0.0) throw DomainError("effective_oscillator: requires delta < 0");
    const double c2 = 0.25;
    const double den = c2 + d * d;
    EffectiveOscillator o;
    o.omega_m = std::sqrt(w0sq * std::abs(d) * (3.0 * c2 - d * d) / (0.5 * den));
    o.delta_m = 2.0 * w0sq * std::abs(d) * (d * d - c2) / (den * den);
    o.q_m = o.omega_m / (2.0 * o.delta_m);
    return o;
}

inline EffectiveOscillator effective_oscillator(const PhysicalParams& p) {
    const NormalizedParams n = normalize(p);
    EffectiveOscillator o = effective_oscillator_normalized(n.d, n.w0sq);
    o.omega_m *= p.kappa0;
    o.delta_m *= p.kappa0;
    return o;
}

// Characteristic quartic in s = -i Omega, obtained by clearing the
// denominator of K(s) - m s^2 (not monic; leading coefficient kappa0/2):
//   P(s) = (1/2) s^4 + (1/2) s^3 + (1/2)(1/4 + d^2) s^2
//          - d w0sq s - w0sq d (3/4 - d^2)
// Coefficients ordered {a4, a3, a2, a1, a0}.
inline std::array<double, 5> characteristic_polynomial(double d, double w0sq) {
    const double c = 0.5;
    return {c, 2.0 * c * c, c * (c * c + d * d), -2.0 * c * d * w0sq,
            -w0sq * d * (3.0 * c * c - d * d)};
}

// Denominator of Eq.-form K(s): c((c+s)^2 + d^2); used by the rational
// sampling identity P(s) = (s^2 + K(s)) * den(s).
inline complex characteristic_denominator(double d, complex s) {
    const double c = 0.5;
    return c * ((c + s) * (c + s) + d * d);
}

inline complex eval_poly(const std::array<double, 5>& a, complex s) {
    return ((((a[0] * s) + a[1]) * s + a[2]) * s + a[3]) * s + a[4];
}

// Quartic roots via companion-matrix eigenvalues.
inline std::array<complex, 4> quartic_roots(const std::array<double, 5>& a) {
    Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
    comp(0, 0) = -a[1] / a[0];
    comp(0, 1) = -a[2] / a[0];
    comp(0, 2) = -a[3] / a[0];
    comp(0, 3) = -a[4] / a[0];
    comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix4d> es(comp, false);
    std::array<complex, 4> roots;
    for (int i = 0; i < 4; ++i) roots[i] = es.eigenvalues()(i);
    return roots;
}

enum class Verdict { Stable, Unstable, Marginal };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        default: return "marginal";
    }
}

struct StabilityVerdict {
    std::array<double, 5> poly{};      // {a4..a0}
    bool rh_stable = false;            // strict Routh-Hurwitz result
    Verdict verdict = Verdict::Unstable;
    std::array<complex, 4> roots{};    // [kappa0] units
    double max_real_part = 0.0;        // [kappa0] units
};

// Routh-Hurwitz on the quartic with a relative marginality band: each
// inequality is "marginal" when within tol of zero on its natural scale.
inline StabilityVerdict is_stable_normalized(double d, double w0sq,
                                             double tol = 1e-9) {
    StabilityVerdict v;
    v.poly = characteristic_polynomial(d, w0sq);
    const double a4 = v.poly[0], a3 = v.poly[1], a2 = v.poly[2],
                 a1 = v.poly[3], a0 = v.poly[4];
    const double d2 = a3 * a2 - a4 * a1;
    const double d3 = a1 * d2 - a0 * a3 * a3;
    const double s1 = std::abs(a1) + std::abs(a3 * a2) + std::abs(a4 * a1);
    const double s3 = std::abs(a1 * d2) + std::abs(a0 * a3 * a3);
    const double s0 = std::abs(a0) + w0sq;  // a0 vanishes with the pump too

    v.rh_stable = (a1 > 0.0) && (d2 > 0.0) && (d3 > 0.0) && (a0 > 0.0);
    const bool marginal = (std::abs(a1) <= tol * std::max(s1, 1e-300)) ||
                          (std::abs(d3) <= tol * std::max(s3, 1e-300)) ||
                          (std::abs(a0) <= tol * std::max(s0, 1e-300)) ||
                          (d2 >= 0.0 && d2 <= tol * std::max(std::abs(a3 * a2), 1e-300));
    v.roots = quartic_roots(v.poly);
    v.max_real_part = v.roots[0].real();
    for (const auto& r : v.roots) v.max_real_part = std::max(v.max_real_part, r.real());

    if (marginal || std::abs(v.max_real_part) <= tol)
        v.verdict = Verdict::Marginal;
    else
        v.verdict = v.rh_stable ? Verdict::Stable : Verdict::Unstable;
    return v;
}

inline StabilityVerdict is_stable(const PhysicalParams& p) {
    const NormalizedParams n = normalize(p);
    StabilityVerdict v = is_stable_normalized(n.d, n.w0sq);
    for (auto& r : v.roots) r *= p.kappa0;
    v.max_real_part *= p.kappa0;
    return v;
}

// Closed-form conditions (detuned stable window plus pump bound):
// d < 0, 1/2 < |d| < sqrt(3)/2, 0 < y < 1.
inline bool stable_closed_form(double d, double y) {
    return d < 0.0 && std::abs(d) > 0.5 && std::abs(d) < std::sqrt(3.0) / 2.0 &&
           y > 0.0 && y < 1.0;
}

// Distance to the nearest closed-form boundary in (|d|, y) coordinates.
inline double closed_form_margin(double d, double y) {
    const double ad = std::abs(d);
    double m = std::abs(ad - 0.5);
    m = std::min(m, std::abs(ad - std::sqrt(3.0) / 2.0));
    m = std::min(m, std::abs(y - 1.0));
    m = std::min(m, std::abs(y));
    m = std::min(m, ad);  // d = 0 axis
    return m;
}

struct StabilityCell {
    double d = 0.0;
    double y = 0.0;
    StabilityVerdict verdict;
    bool closed_form = false;
};

struct StabilityGrid {
    std::vector<double> d_values;
    std::vector<double> y_values;
    std::vector<StabilityCell> cells;  // row-major over (d, y)
};

}  // namespace optrig

#include "optrig/sweep.hpp"

namespace optrig {

// Per-cell verdicts over a (d, y) grid; the pump at each cell is
// y * |Omega0max^2(d)| (see normalized_pump). Cells are independent and
// evaluated in parallel.
inline StabilityGrid stability_map(std::vector<double> d_values,
                                   std::vector<double> y_values) {
    if (d_values.empty() || y_values.empty())
        throw ConfigError("stability_map: grid axes must be non-empty");
    StabilityGrid grid;
    grid.d_values = std::move(d_values);
    grid.y_values = std::move(y_values);
    grid.cells.resize(grid.d_values.size() * grid.y_values.size());
    const std::size_t ny = grid.y_values.size();
    parallel_for(grid.cells.size(), [&](std::size_t idx) {
        const double d = grid.d_values[idx / ny];
        const double y = grid.y_values[idx % ny];
        StabilityCell& cell = grid.cells[idx];
        cell.d = d;
        cell.y = y;
        cell.verdict = is_stable_normalized(d, normalized_pump(d, y));
        cell.closed_form = stable_closed_form(d, y);
    });
    return grid;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = (n == 1) ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

}  // namespace optrig
