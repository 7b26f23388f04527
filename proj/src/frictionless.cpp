#include "smallcost/frictionless.hpp"

#include <cmath>
#include <stdexcept>

namespace smallcost {

double merton_weight(const BlackScholesParams& bs, double gamma) {
    validate(bs);
    if (gamma <= 0.0) throw ValidationError("gamma must be positive");
    return bs.mu / (gamma * bs.sigma * bs.sigma);
}

RiccatiAux ko_riccati_aux(const KimOmbergParams& ko, double gamma) {
    const double q = (1.0 - gamma) / gamma;
    const double vr = ko.sigma_F / ko.sigma_S;
    RiccatiAux aux;
    aux.b = 2.0 * (q * vr * ko.rho - ko.kappa);
    const double eta_sq = aux.b * aux.b - 4.0 * q * vr * vr * (1.0 + q * ko.rho);
    if (eta_sq <= 0.0) throw std::domain_error("complex discriminant");
    aux.eta = std::sqrt(eta_sq);
    return aux;
}

RiccatiCoefficients ko_riccati(const KimOmbergParams& ko, double gamma, double T, double u) {
    validate(ko);
    if (gamma <= 1.0) throw ValidationError("gamma must exceed 1 for the normal solution");
    if (u > T) throw ValidationError("u must not exceed T");

    const auto [b, eta] = ko_riccati_aux(ko, gamma);
    const double q = (1.0 - gamma) / gamma;
    const double tau = T - u;  // all formulas keyed on time-to-horizon
    const double s2 = ko.sigma_S * ko.sigma_S;
    const double em = std::exp(-eta * tau);
    const double em2 = std::exp(-eta * tau / 2.0);
    const double denom = 2.0 * eta - (b + eta) * (1.0 - em);

    RiccatiCoefficients rc;
    rc.time_to_horizon = tau;
    rc.C = q * (2.0 / s2) * (1.0 - em) / denom;
    rc.B = 4.0 * q * (ko.kappa * ko.F_bar / s2) * (1.0 - em2) / (eta * denom);

    const double kF2 = ko.kappa * ko.kappa * ko.F_bar * ko.F_bar;
    const double sF2 = ko.sigma_F * ko.sigma_F;
    rc.A = q * (gamma * ko.r + 2.0 * kF2 / (s2 * eta * eta) + sF2 / (s2 * (eta - b))) * tau;
    rc.A += q * (4.0 * kF2 / s2) *
            ((2.0 * b + eta) * em - 4.0 * b * em2 + 2.0 * b - eta) / (eta * eta * eta * denom);
    // Log term normalized by its tau = 0 value so that A vanishes exactly at the
    // horizon; the additive constant does not alter the Riccati dynamics.
    rc.A += q * (2.0 * sF2 / s2) * std::log(std::abs(denom / (2.0 * eta))) /
            (2.0 * eta * (eta * eta - b * b));
    return rc;
}

KoWeight ko_weight(const KimOmbergParams& ko, double gamma, double T, double t, double f) {
    const RiccatiCoefficients rc = ko_riccati(ko, gamma, T, t);
    const double s2 = ko.sigma_S * ko.sigma_S;
    const double hedge = ko.rho * ko.sigma_F / (gamma * ko.sigma_S);
    KoWeight w;
    w.pi = f / (gamma * s2) + hedge * (rc.B + rc.C * f);
    w.pi_f = 1.0 / (gamma * s2) + hedge * rc.C;
    return w;
}

double ko_value(const KimOmbergParams& ko, double gamma, double T, double t, double z, double f) {
    if (z <= 0.0) throw ValidationError("z must be positive");
    const RiccatiCoefficients rc = ko_riccati(ko, gamma, T, t);
    return std::pow(z, 1.0 - gamma) / (1.0 - gamma) *
           std::exp(rc.A + rc.B * f + 0.5 * rc.C * f * f);
}

StationaryPolicy ko_stationary(const KimOmbergParams& ko, double gamma) {
    validate(ko);
    if (gamma <= 1.0) throw ValidationError("gamma must exceed 1 for the normal solution");
    const auto [b, eta] = ko_riccati_aux(ko, gamma);
    if (eta - b == 0.0) throw std::domain_error("eta equals b");
    const double q = (1.0 - gamma) / gamma;
    const double s2 = ko.sigma_S * ko.sigma_S;

    StationaryPolicy sp;
    sp.C_bar = q * 2.0 / (s2 * (eta - b));
    sp.B_bar = 4.0 * q * ko.kappa * ko.F_bar / (s2 * eta * (eta - b));
    const double hedge = ko.rho * ko.sigma_F / (gamma * ko.sigma_S);
    sp.pi_bar_intercept = hedge * sp.B_bar;
    sp.pi_bar_slope = 1.0 / (gamma * s2) + hedge * sp.C_bar;
    return sp;
}

namespace {

// Generic HJB residual for the one-asset factor model; the coefficient
// functions cover both the Black-Scholes and Kim-Omberg specializations.
double hjb_residual_impl(double r, double sigma_S, double rho,
                         const std::function<double(double)>& mu_S,
                         const std::function<double(double)>& mu_F,
                         const std::function<double(double)>& sigma_F,
                         const std::function<double(double, double, double)>& v,
                         const HjbGrid& g) {
    double worst = 0.0;
    const double dt = g.dt, dz = g.dz, df = g.df;
    for (double t : g.t) {
        for (double z : g.z) {
            for (double f : g.f) {
                const double v0 = v(t, z, f);
                const double v_t = (v(t + dt, z, f) - v(t - dt, z, f)) / (2.0 * dt);
                const double v_z = (v(t, z + dz, f) - v(t, z - dz, f)) / (2.0 * dz);
                const double v_zz =
                    (v(t, z + dz, f) - 2.0 * v0 + v(t, z - dz, f)) / (dz * dz);
                const double v_f = (v(t, z, f + df) - v(t, z, f - df)) / (2.0 * df);
                const double v_ff =
                    (v(t, z, f + df) - 2.0 * v0 + v(t, z, f - df)) / (df * df);
                const double v_zf = (v(t, z + dz, f + df) - v(t, z + dz, f - df) -
                                     v(t, z - dz, f + df) + v(t, z - dz, f - df)) /
                                    (4.0 * dz * df);

                const double sF = sigma_F(f);
                const double theta =
                    v_zz == 0.0 ? 0.0
                                : -(mu_S(f) / (sigma_S * sigma_S)) * (v_z / v_zz) -
                                      (rho * sF / sigma_S) * (v_zf / v_zz);
                const double Av = v_t + mu_F(f) * v_f + 0.5 * sF * sF * v_ff + r * z * v_z +
                                  mu_S(f) * theta * v_z +
                                  0.5 * sigma_S * sigma_S * theta * theta * v_zz +
                                  theta * sigma_S * sF * rho * v_zf;
                worst = std::max(worst, std::abs(Av) / (1.0 + std::abs(v0)));
            }
        }
    }
    return worst;
}

}  // namespace

double hjb_residual(const KimOmbergParams& ko, double gamma,
                    const std::function<double(double, double, double)>& value,
                    const HjbGrid& grid) {
    validate(ko);
    (void)gamma;
    return hjb_residual_impl(
        ko.r, ko.sigma_S, ko.rho, [](double f) { return f; },
        [&ko](double f) { return ko.kappa * (ko.F_bar - f); },
        [&ko](double) { return ko.sigma_F; }, value, grid);
}

double hjb_residual(const BlackScholesParams& bs, double gamma,
                    const std::function<double(double, double, double)>& value,
                    const HjbGrid& grid) {
    validate(bs);
    (void)gamma;
    return hjb_residual_impl(
        bs.r, bs.sigma, 0.0, [&bs](double) { return bs.mu; }, [](double) { return 0.0; },
        [](double) { return 0.0; }, value, grid);
}

}  // namespace smallcost
