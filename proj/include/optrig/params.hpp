#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

// System parameters, unit normalization, pump bookkeeping, steady state and
// the shared complex response primitives used by every other module.
//
// All frequency-domain internals run in normalized units: kappa0 is the
// frequency unit, m = 1, hbar = 1. Dimensional conversion happens only at
// the API boundary (PhysicalParams <-> NormalizedParams).

namespace optrig {

using complex = std::complex<double>;

inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double c_light = 299792458.0;   // m/s

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Dimensional description of the optomechanical system.
struct PhysicalParams {
    double m = 0.0;        // test mass [kg]
    double omega_p = 0.0;  // pump angular frequency [rad/s]
    double kappa0 = 0.0;   // cavity linewidth FWHM [rad/s]
    double delta = 0.0;    // detuning omega_p - omega_0 [rad/s], any sign
    double eta = 0.0;      // dissipative coupling constant [1/m]
    double w_in = 0.0;     // input power [W]

    void validate() const {
        if (!(m > 0.0)) throw ConfigError("PhysicalParams: m must be > 0");
        if (!(kappa0 > 0.0)) throw ConfigError("PhysicalParams: kappa0 must be > 0");
        if (!(omega_p > 0.0)) throw ConfigError("PhysicalParams: omega_p must be > 0");
        if (!(w_in >= 0.0)) throw ConfigError("PhysicalParams: w_in must be >= 0");
        if (!std::isfinite(eta)) throw ConfigError("PhysicalParams: eta must be finite");
        if (!std::isfinite(delta)) throw ConfigError("PhysicalParams: delta must be finite");
    }
};

// Recalculated pump Omega0^2 = eta^2 W_in / (4 m omega_p)  [rad^2/s^2].
inline double pump_scale(const PhysicalParams& p) {
    p.validate();
    return p.eta * p.eta * p.w_in / (4.0 * p.m * p.omega_p);
}

// Equivalent form through the stored energy E0 (W_in = kappa0 * E0).
inline double pump_scale_from_energy(double eta, double kappa0, double e0,
                                     double m, double omega_p) {
    return eta * eta * kappa0 * e0 / (4.0 * m * omega_p);
}

// Equivalent form through the mean input amplitude A_in [sqrt(quanta/s)]:
// Omega0^2 = hbar eta^2 A_in^2 (kappa0/2)^2 / (m ((kappa0/2)^2 + delta^2)).
inline double pump_scale_from_input_amplitude(double eta, double a_in, double kappa0,
                                              double delta, double m) {
    const double half = 0.5 * kappa0;
    return hbar * eta * eta * a_in * a_in * half * half /
           (m * (half * half + delta * delta));
}

// Pump bound Omega0max^2 = (kappa0/|delta|)(delta^2 - (kappa0/2)^2).
// Negative result signals a vacuous bound (|delta| < kappa0/2); it is
// reported as-is, not clamped.
inline double omega0_max_sq(double kappa0, double delta) {
    if (delta == 0.0) throw DomainError("omega0_max_sq: delta must be nonzero");
    const double half = 0.5 * kappa0;
    return (kappa0 / std::abs(delta)) * (delta * delta - half * half);
}

// Dimensionless system description: the model depends on (d, w0sq) only.
struct NormalizedParams {
    double d = 0.0;     // delta / kappa0
    double w0sq = 0.0;  // (Omega0 / kappa0)^2
    double y = 0.0;     // pump fraction Omega0^2 / Omega0max^2 (0 if undefined)
};

inline double omega0_max_sq_normalized(double d) { return omega0_max_sq(1.0, d); }

// Pump used by stability maps: y * |Omega0max^2| so the pump stays physical
// (>= 0) also where the bound is vacuous; zero on the d = 0 axis.
inline double normalized_pump(double d, double y) {
    if (d == 0.0) return 0.0;
    return y * std::abs(omega0_max_sq_normalized(d));
}

inline NormalizedParams make_normalized(double d, double y) {
    NormalizedParams n;
    n.d = d;
    n.y = y;
    n.w0sq = normalized_pump(d, y);
    return n;
}

inline NormalizedParams normalize(const PhysicalParams& p) {
    NormalizedParams n;
    n.d = p.delta / p.kappa0;
    n.w0sq = pump_scale(p) / (p.kappa0 * p.kappa0);
    const double wmax = (p.delta == 0.0) ? 0.0 : omega0_max_sq_normalized(n.d);
    n.y = (wmax > 0.0) ? n.w0sq / wmax : 0.0;
    return n;
}

// Checks an over-determined pump specification (physical W_in/eta pair plus a
// normalized y) for consistency at relative tolerance 1e-6.
inline void check_pump_consistency(const PhysicalParams& p, double y) {
    const double from_power = pump_scale(p);
    const double from_y = y * omega0_max_sq(p.kappa0, p.delta);
    const double scale = std::max(std::abs(from_power), std::abs(from_y));
    if (scale > 0.0 && std::abs(from_power - from_y) > 1e-6 * scale)
        throw ConfigError("pump specification inconsistent: W_in/eta gives Omega0^2 = " +
                          std::to_string(from_power) + " but y gives " +
                          std::to_string(from_y));
}

// Mean amplitudes of the pumped cavity (phase convention A_in = A_in^*).
struct SteadyState {
    complex a;       // intracavity mean amplitude [sqrt(quanta)]
    double a_in;     // input mean amplitude [sqrt(quanta/s)]
    complex a_out;   // reflected mean amplitude
};

inline SteadyState steady_state(const PhysicalParams& p, double a_in) {
    const complex psi(0.5 * p.kappa0, -p.delta);
    SteadyState s;
    s.a_in = a_in;
    s.a = std::sqrt(p.kappa0) * a_in / psi;
    s.a_out = a_in * std::conj(psi) / psi;
    return s;
}

// Complex response primitives at one sideband frequency. In normalized form
// (kappa0 = 1) psi-type fields carry kappa0 units; g/j/beta are dimensionless.
struct ResponseKernel {
    double omega = 0.0;
    complex psi, psi_conj;
    complex psi_big, psi_big_conj;      // Psi = kappa0/2 - i(delta + Omega)
    complex psi_minus, psi_minus_conj;  // Psi_- = kappa0/2 - i(delta - Omega)
    complex g_plus, g_minus;
    complex j_plus, j_minus;
    complex beta_plus, beta_minus;      // beta_- stored unconjugated
};

// Kernel in kappa0 = 1 units; d = delta/kappa0, w = Omega/kappa0.
inline ResponseKernel response_kernel_normalized(double d, double w) {
    ResponseKernel k;
    k.omega = w;
    k.psi = complex(0.5, -d);
    k.psi_big = complex(0.5, -(d + w));
    k.psi_minus = complex(0.5, -(d - w));
    k.psi_conj = std::conj(k.psi);
    k.psi_big_conj = std::conj(k.psi_big);
    k.psi_minus_conj = std::conj(k.psi_minus);
    const complex i(0.0, 1.0);
    k.g_plus = 0.25 * (1.0 / k.psi + 1.0 / k.psi_conj);
    k.g_minus = 0.25 / i * (1.0 / k.psi - 1.0 / k.psi_conj);
    k.j_plus = 0.25 * (1.0 / k.psi_big + 1.0 / k.psi_minus_conj);
    k.j_minus = 0.25 / i * (1.0 / k.psi_big - 1.0 / k.psi_minus_conj);
    // the two unit-modulus phase ratios behind beta+-
    const complex r1 = (k.psi * k.psi_big_conj) / (k.psi_conj * k.psi_big);
    const complex r2 = (k.psi_conj * k.psi_minus) / (k.psi * k.psi_minus_conj);
    k.beta_plus = 0.5 * (r1 + r2);
    k.beta_minus = 0.5 / i * (r1 - r2);
    return k;
}

inline ResponseKernel response_kernel(const PhysicalParams& p, double omega) {
    ResponseKernel k = response_kernel_normalized(p.delta / p.kappa0, omega / p.kappa0);
    k.omega = omega;
    k.psi *= p.kappa0;
    k.psi_conj *= p.kappa0;
    k.psi_big *= p.kappa0;
    k.psi_big_conj *= p.kappa0;
    k.psi_minus *= p.kappa0;
    k.psi_minus_conj *= p.kappa0;
    return k;
}

}  // namespace optrig
