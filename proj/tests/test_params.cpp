#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "optrig/params.hpp"

using namespace optrig;
using Catch::Approx;

namespace {

PhysicalParams estimate_params(double eta) {
    PhysicalParams p;
    p.m = 1e-11;
    p.omega_p = 2.0 * M_PI * c_light / 1e-6;
    p.kappa0 = 3e6;
    p.delta = -0.55 * p.kappa0;
    p.eta = eta;
    p.w_in = 1e-4;
    return p;
}

}  // namespace

TEST_CASE("pump scale: no pump, paper estimate, linearity") {
    PhysicalParams p = estimate_params(1.0);
    p.w_in = 0.0;
    CHECK(pump_scale(p) == 0.0);

    // m = 1e-11 kg, lambda = 1e-6 m, W_in = 1e-4 W, eta = 4k/|T0|, |T0|^2 = 1e-4
    const double k = 2.0 * M_PI / 1e-6;
    PhysicalParams est = estimate_params(4.0 * k / std::sqrt(1e-4));
    const double omega0 = std::sqrt(pump_scale(est));
    CHECK(omega0 == Approx(9.2e4).epsilon(0.02));

    // doubling W_in doubles Omega0^2 exactly
    PhysicalParams twice = est;
    twice.w_in = 2.0 * est.w_in;
    CHECK(pump_scale(twice) == 2.0 * pump_scale(est));
}

TEST_CASE("pump scale: homogeneity degree 2 in eta, degree 1 in W_in") {
    PhysicalParams p = estimate_params(1.5);
    PhysicalParams p2 = p;
    p2.eta = 2.0 * p.eta;
    CHECK(pump_scale(p2) == 4.0 * pump_scale(p));
    p2.eta = p.eta;
    p2.w_in = 0.25;
    p.w_in = 0.125;
    CHECK(pump_scale(p2) == 2.0 * pump_scale(p));
}

TEST_CASE("pump scale: equivalent forms agree") {
    PhysicalParams p = estimate_params(2.5e9);
    const double direct = pump_scale(p);
    CHECK(pump_scale_from_energy(p.eta, p.kappa0, p.w_in / p.kappa0, p.m, p.omega_p) ==
          Approx(direct).epsilon(1e-14));
    // A_in from the flux bookkeeping W_in = hbar omega_p kappa0^2 A_in^2 / |psi|^2
    const double psi_sq = 0.25 * p.kappa0 * p.kappa0 + p.delta * p.delta;
    const double a_in =
        std::sqrt(p.w_in * psi_sq / (hbar * p.omega_p * p.kappa0 * p.kappa0));
    CHECK(pump_scale_from_input_amplitude(p.eta, a_in, p.kappa0, p.delta, p.m) ==
          Approx(direct).epsilon(1e-12));
}

TEST_CASE("omega0 max: boundary, derived values, errors") {
    CHECK(omega0_max_sq(1.0, -0.5) == 0.0);
    // second evaluator: (delta^2 - (k0/2)^2) * k0 / |delta|
    const double expect055 = (0.55 * 0.55 - 0.25) * 1.0 / 0.55;
    CHECK(omega0_max_sq(1.0, -0.55) == Approx(expect055).epsilon(1e-14));
    CHECK(omega0_max_sq(1.0, -0.55) == Approx(0.09545454545454546).epsilon(1e-12));
    CHECK(omega0_max_sq(1.0, -std::sqrt(3.0) / 2.0) ==
          Approx(0.5773502691896258).epsilon(1e-12));
    CHECK_THROWS_AS(omega0_max_sq(1.0, 0.0), DomainError);
    // vacuous bound is reported negative, not clamped
    CHECK(omega0_max_sq(1.0, -0.3) < 0.0);
}

TEST_CASE("steady state: resonant pump, pinned point, unit-modulus reflection") {
    PhysicalParams p = estimate_params(1.0);
    p.delta = 0.0;
    const SteadyState res = steady_state(p, 2.0);
    CHECK(res.a.real() == Approx(2.0 * 2.0 / std::sqrt(p.kappa0)).epsilon(1e-14));
    CHECK(res.a.imag() == 0.0);
    CHECK(res.a_out.real() == Approx(2.0).epsilon(1e-14));

    PhysicalParams q = estimate_params(1.0);
    q.kappa0 = 1.0;
    q.delta = -0.5;
    const SteadyState s = steady_state(q, 1.0);
    CHECK(s.a.real() == Approx(1.0).epsilon(1e-14));
    CHECK(s.a.imag() == Approx(-1.0).epsilon(1e-14));

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        PhysicalParams r = estimate_params(1.0);
        r.delta = uni(rng) * r.kappa0;
        const double a_in = std::abs(uni(rng)) + 0.1;
        CHECK(std::abs(steady_state(r, a_in).a_out) == Approx(a_in).epsilon(1e-12));
    }
}

TEST_CASE("response kernel: pinned values and identities") {
    const ResponseKernel k0 = response_kernel_normalized(0.0, 0.0);
    CHECK(k0.beta_plus.real() == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(k0.beta_plus.imag()) < 1e-15);
    CHECK(std::abs(k0.beta_minus) < 1e-15);

    // Omega = 0 makes Psi coincide with psi, so j equals g exactly
    for (const double d : {-0.7, -0.55, 0.3, 1.2}) {
        const ResponseKernel k = response_kernel_normalized(d, 0.0);
        CHECK(k.j_plus == k.g_plus);
        CHECK(k.j_minus == k.g_minus);
    }

    // g_- at Omega = 0 reduces to kappa0 delta / (2 |psi|^2)
    const ResponseKernel k = response_kernel_normalized(-0.5, 0.0);
    CHECK(k.g_minus.real() == Approx(-0.5).epsilon(1e-14));
    CHECK(std::abs(k.g_minus.imag()) < 1e-15);
}

TEST_CASE("response kernel: |beta+|^2 + |beta-|^2 = 1 for randomized parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    std::uniform_real_distribution<double> uw(0.0, 5.0);
    std::uniform_real_distribution<double> uk(0.1, 10.0);
    for (int i = 0; i < 500; ++i) {
        PhysicalParams p = estimate_params(1.0);
        p.kappa0 = uk(rng);
        p.delta = ud(rng) * p.kappa0;
        const ResponseKernel k = response_kernel(p, uw(rng) * p.kappa0);
        CHECK(std::norm(k.beta_plus) + std::norm(k.beta_minus) ==
              Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("response kernel: dimensional fields carry kappa0 units") {
    PhysicalParams p = estimate_params(1.0);
    const ResponseKernel k = response_kernel(p, 0.3 * p.kappa0);
    CHECK(k.psi.real() == Approx(0.5 * p.kappa0).epsilon(1e-14));
    CHECK(k.psi.imag() == Approx(-p.delta).epsilon(1e-14));
    CHECK(k.psi_big.imag() == Approx(-(p.delta + 0.3 * p.kappa0)).epsilon(1e-14));
    CHECK(k.psi_minus.imag() == Approx(-(p.delta - 0.3 * p.kappa0)).epsilon(1e-14));
}

TEST_CASE("parameter validation and pump consistency") {
    PhysicalParams p = estimate_params(1.0);
    p.m = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = estimate_params(1.0);
    p.w_in = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);

    // (W_in, eta) and (y, delta) given together must agree to 1e-6
    PhysicalParams q = estimate_params(2.5e9);
    const double y = pump_scale(q) / omega0_max_sq(q.kappa0, q.delta);
    CHECK_NOTHROW(check_pump_consistency(q, y));
    CHECK_NOTHROW(check_pump_consistency(q, y * (1.0 + 1e-8)));
    CHECK_THROWS_AS(check_pump_consistency(q, y * 1.001), ConfigError);
}

TEST_CASE("normalized parameters: pump resolution") {
    const NormalizedParams n = make_normalized(-0.55, 0.01);
    CHECK(n.w0sq == Approx(9.545454545454546e-4).epsilon(1e-12));
    // vacuous-bound region uses |Omega0max^2|, d = 0 has no pump
    CHECK(normalized_pump(-0.3, 0.5) > 0.0);
    CHECK(normalized_pump(0.0, 0.5) == 0.0);

    PhysicalParams p = estimate_params(2.5e9);
    const NormalizedParams m = normalize(p);
    CHECK(m.d == Approx(-0.55).epsilon(1e-14));
    CHECK(m.w0sq * p.kappa0 * p.kappa0 == Approx(pump_scale(p)).epsilon(1e-12));
    CHECK(m.y == Approx(pump_scale(p) / omega0_max_sq(p.kappa0, p.delta)).epsilon(1e-12));
}
