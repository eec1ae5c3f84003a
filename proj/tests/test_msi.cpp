#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "optrig/msi.hpp"

using namespace optrig;
using Catch::Approx;

namespace {

MsiParams lossless(double t_bs_sq, double t_sq, double phi_minus) {
    MsiParams m;
    m.t_bs = std::sqrt(t_bs_sq);
    m.r_bs = std::sqrt(1.0 - t_bs_sq);
    m.t = std::sqrt(t_sq);
    m.r = std::sqrt(1.0 - t_sq);
    m.k = 2.0 * M_PI / 1e-6;
    m.length = 1.0;
    m.phi_minus = phi_minus;
    return m;
}

}  // namespace

TEST_CASE("gm scattering: unitarity over random lossless draws") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u01(0.02, 0.98);
    std::uniform_real_distribution<double> uphi(-M_PI, M_PI);
    for (int i = 0; i < 1000; ++i) {
        MsiParams m = lossless(u01(rng), u01(rng), uphi(rng));
        m.phi_plus = uphi(rng);
        const GmScattering g = gm_scattering(m);
        CHECK(std::norm(g.tt) + std::norm(g.rr_right) == Approx(1.0).margin(1e-12));
        CHECK(std::abs(g.rr_left) == Approx(std::abs(g.rr_right)).margin(1e-12));
    }
}

TEST_CASE("gm scattering: fully reflective at quarter-wave with balanced splitter") {
    // Delta_bs = 0, T = 0, phi_- = pi/2
    const MsiParams m = lossless(0.5, 0.0, M_PI / 2.0);
    const GmScattering g = gm_scattering(m);
    CHECK(std::abs(g.tt) < 1e-15);
    CHECK(std::abs(g.rr_right) == Approx(1.0).margin(1e-12));
}

TEST_CASE("gm scattering: invariant violation is rejected") {
    MsiParams m = lossless(0.5, 0.3, 0.0);
    m.r_bs = 0.9;  // breaks t_bs^2 + r_bs^2 = 1
    CHECK_THROWS_AS(gm_scattering(m), ConfigError);
}

TEST_CASE("phi0: balanced splitter, derived arithmetic, error cases") {
    CHECK(solve_phi0(lossless(0.5, 0.3, 0.0)).principal == Approx(M_PI / 2).epsilon(1e-12));

    // T_bs^2 = 0.51, R_bs^2 = 0.49, T^2 = 0.3, R^2 = 0.7
    const Phi0Solution s = solve_phi0(lossless(0.51, 0.3, 0.0));
    const double expect = std::sqrt(0.7) * 0.02 /
                          (2.0 * std::sqrt(0.3) * std::sqrt(0.51) * std::sqrt(0.49));
    CHECK(s.cos_phi0 == Approx(expect).epsilon(1e-12));
    CHECK(s.cos_phi0 == Approx(0.03056).margin(2e-5));
    CHECK(s.negative == Approx(-s.principal).epsilon(1e-15));

    CHECK_THROWS_AS(solve_phi0(lossless(0.4, 0.0, 0.0)), DomainError);   // T = 0, unbalanced
    CHECK_THROWS_AS(solve_phi0(lossless(0.9, 0.02, 0.0)), DomainError);  // |cos| > 1
}

TEST_CASE("gm design: derived chain for |T0|^2 = 1e-4, R^2 = 0.7") {
    const double k = 2.0 * M_PI * 1e6;
    const GmDesign g = design_gm(1e-4, 0.7, k, 1.0);

    CHECK(g.msi.t_bs * g.msi.t_bs == Approx(0.50273861287752583).epsilon(1e-12));
    CHECK(g.msi.t_bs * g.msi.t_bs == Approx(0.50274).margin(1e-5));
    CHECK(g.rr0_abs == Approx(0.99995).margin(1e-4));
    CHECK(g.eta / k == Approx(334.66).epsilon(1e-3));
    CHECK(g.eta == Approx(2.103e9).epsilon(1e-3));
    CHECK(std::abs(g.tt0) == Approx(1e-2).epsilon(1e-10));
    // lossless design point
    CHECK(std::norm(g.tt0) + g.rr0_abs * g.rr0_abs == Approx(1.0).margin(1e-10));
    // operating-point equation
    const double cos_expect = -g.msi.r * g.msi.delta_bs() /
                              (2.0 * g.msi.t * g.msi.t_bs * g.msi.r_bs);
    CHECK(std::cos(g.phi0) == Approx(cos_expect).margin(1e-12));
    // kappa0 = |T0|^2 / tau
    CHECK(g.kappa0 == Approx(1e-4 / (2.0 / c_light)).epsilon(1e-10));
}

TEST_CASE("gm design: input validation") {
    const double k = 2.0 * M_PI * 1e6;
    CHECK_THROWS_AS(design_gm(0.0, 0.7, k, 1.0), ConfigError);
    CHECK_THROWS_AS(design_gm(1.0, 0.7, k, 1.0), ConfigError);
    CHECK_THROWS_AS(design_gm(1e-4, 1.0, k, 1.0), ConfigError);
    CHECK_THROWS_AS(design_gm(1e-4, 0.7, k, 1.0, 0), ConfigError);
    CHECK_NOTHROW(design_gm(1e-4, 0.7, k, 1.0, +1));
}

TEST_CASE("gm design: pure dissipative coupling at the operating point") {
    const GmDesign g = design_gm(1e-4, 0.7, 2.0 * M_PI * 1e6, 1.0);
    const double h = 1e-6;

    auto at = [&](double dphi) {
        MsiParams m = g.msi;
        m.phi_minus = g.phi0 + dphi;
        return gm_scattering(m);
    };
    const complex dtt = (at(h).tt - at(-h).tt) / (2.0 * h) / g.tt0;
    CHECK(std::abs(dtt.imag()) < 1e-10 * std::abs(dtt.real()));
    CHECK(dtt.real() ==
          Approx(g.msi.r * g.rr0_abs / std::abs(g.tt0)).epsilon(1e-6));

    const complex rr0 = at(0.0).rr_right;
    const complex drr = (at(h).rr_right - at(-h).rr_right) / (2.0 * h) / rr0;
    CHECK(std::abs(drr.imag()) < 1e-10 * std::max(1.0, std::abs(drr.real())));
}

TEST_CASE("gm design: first-order transmittance expansion in the displacement") {
    const GmDesign g = design_gm(1e-4, 0.7, 2.0 * M_PI * 1e6, 1.0);
    const double slope = g.msi.r * g.rr0_abs / std::abs(g.tt0);  // per 2kx
    for (const double kx : {1e-5, 1e-6}) {
        const double x = kx / g.msi.k;
        const complex rel = (gm_transmittance_at(g, x) - g.tt0) / g.tt0;
        CHECK(rel.real() == Approx(slope * 2.0 * kx).epsilon(20.0 * kx));
        CHECK(std::abs(rel.imag()) < 10.0 * kx * kx + 1e-12);
    }
}

TEST_CASE("gm design: kappa(x) linearization matches kappa0(1 + eta x)") {
    for (const int sign : {-1, +1}) {
        const GmDesign g = design_gm(1e-4, 0.7, 2.0 * M_PI * 1e6, 1.0, sign);
        const double x = 1e-4 / g.msi.k;  // kx = 1e-4
        const double slope =
            (gm_kappa_at(g, x) - gm_kappa_at(g, -x)) / (2.0 * x * g.kappa0);
        CHECK(slope == Approx(g.eta).epsilon(1e-6));
        CHECK(g.eta > 0.0);
    }
}

TEST_CASE("radiation force: cross-product structure") {
    CHECK(radiation_force(complex(3.0, 1.0), complex(0.0, 0.0), 2.0,
                          std::sqrt(0.7)) == 0.0);
    // real intracavity, imaginary input: no force
    CHECK(radiation_force(complex(1.0, 0.0), complex(0.0, 1.0), 1.0,
                          std::sqrt(0.7), 1.0) == Approx(0.0).margin(1e-15));
    // B_c = B_in = 1, k = 1, R^2 = 0.7, hbar = 1
    CHECK(radiation_force(complex(1.0, 0.0), complex(1.0, 0.0), 1.0,
                          std::sqrt(0.7), 1.0) == Approx(2.8).epsilon(1e-12));
    // balanced-splitter identity: F = 2 hbar k R^2 (|A_n|^2 - |A_e|^2)
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const complex bc(u(rng), u(rng)), bin(u(rng), u(rng));
        const double r_sq = 0.3 + 0.5 * std::abs(u(rng)) / 2.0;
        const complex ae = (bc - bin) / std::sqrt(2.0);
        const complex an = (bc + bin) / std::sqrt(2.0);
        const double direct = 2.0 * 1.7 * r_sq * (std::norm(an) - std::norm(ae));
        CHECK(radiation_force(bc, bin, 1.7, std::sqrt(r_sq), 1.0) ==
              Approx(direct).margin(1e-12));
    }
}
