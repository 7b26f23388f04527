#include <doctest.h>

#include <cmath>

#include "smallcost/welfare.hpp"

using namespace smallcost;

namespace {
const KimOmbergParams kBench{0.0168, 0.151, 0.271, 0.041, 0.0343, 0.0};
const KimOmbergParams kBenchRho{0.0168, 0.151, 0.271, 0.041, 0.0343, -0.3};
}

TEST_CASE("tilted factor drift matches the coefficient construction") {
    for (const KimOmbergParams& ko : {kBench, kBenchRho}) {
        const double gamma = 3.0;
        const StationaryPolicy sp = ko_stationary(ko, gamma);
        const TiltedOUParams tp = tilted_ou(ko, gamma, sp);
        // Independent reconstruction of the tilted drift as the original drift
        // plus the measure-change and exponent-gradient adjustments.
        const auto drift = [&](double f) {
            return ko.kappa * (ko.F_bar - f) +
                   (1.0 - gamma) * ko.sigma_F * ko.sigma_S * ko.rho * sp.pi_bar(f) +
                   ko.sigma_F * ko.sigma_F * (sp.B_bar + sp.C_bar * f);
        };
        for (double f : {-0.5, 0.0, 0.7}) {
            CHECK(drift(f) ==
                  doctest::Approx(tp.kappa_tilde * (tp.F_tilde - f)).epsilon(1e-12));
        }
    }
}

TEST_CASE("vanishing factor volatility leaves the factor dynamics untouched") {
    KimOmbergParams ko = kBenchRho;
    ko.sigma_F = 1e-10;
    const TiltedOUParams tp = tilted_ou(ko, 3.0, ko_stationary(ko, 3.0));
    CHECK(tp.kappa_tilde == doctest::Approx(ko.kappa).epsilon(1e-8));
    CHECK(tp.F_tilde == doctest::Approx(ko.F_bar).epsilon(1e-8));
}

TEST_CASE("constant-opportunity loss vanishes with the position") {
    const BlackScholesParams idle{0.01, 0.0, 0.2};
    CHECK(esr_loss_bs(idle, 3.0, 0.01).delta_esr == 0.0);
    // pi = 1: mu = gamma sigma^2.
    const BlackScholesParams full{0.01, 3.0 * 0.04, 0.2};
    CHECK(esr_loss_bs(full, 3.0, 0.01).delta_esr == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("losses scale as the two-thirds power of the cost") {
    const BlackScholesParams bs{0.0168, 0.041, 0.151};
    const double l1 = esr_loss_bs(bs, 3.0, 1e-3).delta_esr;
    const double l2 = esr_loss_bs(bs, 3.0, 8e-3).delta_esr;
    CHECK(l2 == doctest::Approx(4.0 * l1).epsilon(1e-12));

    const double k1 = esr_loss_ko(kBench, 3.0, 1e-3).delta_esr;
    const double k2 = esr_loss_ko(kBench, 3.0, 8e-3).delta_esr;
    CHECK(k2 == doctest::Approx(4.0 * k1).epsilon(1e-12));
}

TEST_CASE("mean-reverting loss collapses to the constant case as sigma_F vanishes") {
    KimOmbergParams ko = kBench;
    ko.sigma_F = 1e-8;
    const BlackScholesParams bs{ko.r, ko.F_bar, ko.sigma_S};
    const double loss_ko = esr_loss_ko(ko, 3.0, 0.01).delta_esr;
    const double loss_bs = esr_loss_bs(bs, 3.0, 0.01).delta_esr;
    CHECK(loss_ko == doctest::Approx(loss_bs).epsilon(1e-4));
}

TEST_CASE("factor risk raises the stationary loss at benchmark parameters") {
    const BlackScholesParams bs{0.0168, 0.041, 0.151};
    CHECK(esr_loss_ko(kBench, 3.0, 0.01).delta_esr > esr_loss_bs(bs, 3.0, 0.01).delta_esr);
}

TEST_CASE("quadrature and simulation agree on the stationary loss") {
    MonteCarloConfig mc;
    mc.n_paths = 64;
    mc.seed = 42;
    const MCValue sim = esr_loss_ko_mc(kBench, 3.0, 0.01, mc, 50.0);
    const double quad = esr_loss_ko(kBench, 3.0, 0.01).delta_esr;
    CHECK(std::abs(sim.value - quad) < 3.0 * sim.standard_error);
    CHECK(sim.standard_error < 0.05 * quad);
}

TEST_CASE("finite-horizon loss per year approaches the stationary rate") {
    MonteCarloConfig mc;
    mc.n_paths = 128;
    mc.seed = 9;
    const double T = 100.0;
    const CELResult cel = cel_monte_carlo(kBench, 3.0, T, 0.01, mc);
    const double esr = esr_loss_ko(kBench, 3.0, 0.01).delta_esr;
    const double tol = 3.0 * cel.standard_error / T + 0.02 * esr;
    CHECK(std::abs(cel.cel / T - esr) < tol);
}

TEST_CASE("certainty equivalent loss is positive and grows with the horizon") {
    MonteCarloConfig mc;
    mc.n_paths = 32;
    mc.dt = 1.0 / 100.0;
    const CELResult c5 = cel_monte_carlo(kBench, 3.0, 5.0, 0.01, mc);
    const CELResult c10 = cel_monte_carlo(kBench, 3.0, 10.0, 0.01, mc);
    CHECK(c5.cel > 0.0);
    CHECK(c10.cel > c5.cel);
}

TEST_CASE("second corrector vanishes at the horizon") {
    MonteCarloConfig mc;
    mc.n_paths = 4;
    const MCValue u = second_corrector_u(kBench, 3.0, 10.0, 10.0, 1.0, 0.041, mc);
    CHECK(u.value == 0.0);
    CHECK(u.standard_error == 0.0);
}

TEST_CASE("constant-opportunity second corrector matches the closed form") {
    const BlackScholesParams bs{0.0168, 0.041, 0.151};
    const double gamma = 3.0, T = 8.0, t = 3.0, z = 1.4;
    MonteCarloConfig mc;
    mc.n_paths = 4000;
    mc.dt = 1.0 / 50.0;
    mc.seed = 17;
    const MCValue u = second_corrector_u(bs, gamma, T, t, z, mc);

    // v(s, Z_s) along the optimal wealth is a martingale, which turns the
    // expected running integral into v(t, z) times the horizon:
    // u = (sigma^2 gamma (1 - gamma) dpi^2 / 2) v(t, z) (T - t).
    const double pi = merton_weight(bs, gamma);
    const double dpi = std::cbrt(3.0 / (2.0 * gamma) * pi * pi * (1.0 - pi) * (1.0 - pi));
    const double growth = (1.0 - gamma) * (bs.r + bs.mu * bs.mu / (2.0 * gamma * bs.sigma * bs.sigma));
    const double v = std::pow(z, 1.0 - gamma) / (1.0 - gamma) * std::exp(growth * (T - t));
    const double exact =
        0.5 * bs.sigma * bs.sigma * gamma * (1.0 - gamma) * dpi * dpi * v * (T - t);

    CHECK(exact > 0.0);
    CHECK(std::abs(u.value - exact) < 3.0 * u.standard_error);
    CHECK(u.standard_error < 0.02 * exact);
}

TEST_CASE("mean-reverting second corrector is positive and seed-stable") {
    MonteCarloConfig mc;
    mc.n_paths = 64;
    mc.dt = 1.0 / 100.0;
    const MCValue u1 = second_corrector_u(kBenchRho, 3.0, 10.0, 2.0, 1.0, 0.041, mc);
    const MCValue u2 = second_corrector_u(kBenchRho, 3.0, 10.0, 2.0, 1.0, 0.041, mc);
    CHECK(u1.value > 0.0);
    CHECK(u1.value == u2.value);  // deterministic given the seed
    CHECK(u1.standard_error == u2.standard_error);
}

TEST_CASE("nonpositive tilted speed is reported") {
    // Strong hedging demand (large sigma_F, very negative rho, weak mean
    // reversion) flips the sign of the tilted speed.
    KimOmbergParams ko{0.0, 0.15, 0.1, 0.0, 0.3, -0.9};
    const StationaryPolicy sp = ko_stationary(ko, 3.0);
    CHECK_THROWS_AS(tilted_ou(ko, 3.0, sp), std::domain_error);
}
