#pragma once

#include <functional>
#include <vector>

#include "smallcost/models.hpp"

namespace smallcost {

/// Exponent coefficients of the Kim-Omberg value function
/// v(u,z,f) = z^{1-gamma}/(1-gamma) exp(A + B f + C f^2 / 2),
/// evaluated at time-to-horizon T - u. All three vanish at T - u = 0.
struct RiccatiCoefficients {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double time_to_horizon = 0.0;
};

/// Optimal risky weight and its factor sensitivity at a point in time.
struct KoWeight {
    double pi = 0.0;    // fraction of wealth in the risky asset
    double pi_f = 0.0;  // d pi / d f, independent of f at fixed t
};

/// Infinite-horizon limits of the Riccati coefficients and the affine
/// long-run weight pi_bar(f) = pi_bar_intercept + pi_bar_slope * f.
struct StationaryPolicy {
    double B_bar = 0.0;
    double C_bar = 0.0;
    double pi_bar_intercept = 0.0;
    double pi_bar_slope = 0.0;

    double pi_bar(double f) const { return pi_bar_intercept + pi_bar_slope * f; }
};

/// mu / (gamma sigma^2), the constant optimal weight in the Black-Scholes model.
double merton_weight(const BlackScholesParams& bs, double gamma);

/// Auxiliary constants of the normal-solution branch. eta_sq <= 0 means the
/// branch does not apply and the closed forms below are unavailable.
struct RiccatiAux {
    double b = 0.0;
    double eta = 0.0;
};
RiccatiAux ko_riccati_aux(const KimOmbergParams& ko, double gamma);

/// Closed-form A(u), B(u), C(u) of the normal solution at current time u <= T.
/// Throws std::domain_error("complex discriminant") when eta^2 <= 0.
RiccatiCoefficients ko_riccati(const KimOmbergParams& ko, double gamma, double T, double u);

/// pi(t, f) = f/(gamma sigma_S^2) + (rho sigma_F/(gamma sigma_S)) (B(t) + C(t) f).
KoWeight ko_weight(const KimOmbergParams& ko, double gamma, double T, double t, double f);

/// The closed-form value function; z > 0 required.
double ko_value(const KimOmbergParams& ko, double gamma, double T, double t, double z, double f);

/// T - u -> infinity limits. Throws std::domain_error("eta equals b") when the
/// limit expressions degenerate.
StationaryPolicy ko_stationary(const KimOmbergParams& ko, double gamma);

/// Grid and finite-difference steps for the HJB residual check.
struct HjbGrid {
    std::vector<double> t;
    std::vector<double> z;
    std::vector<double> f;
    double dt = 1e-4;
    double dz = 1e-4;
    double df = 1e-4;
};

/// Max of |A v| / (1 + |v|) over the grid, with all derivatives of the supplied
/// value function taken by central differences and the optimal position theta
/// rebuilt from those same differences.
double hjb_residual(const KimOmbergParams& ko, double gamma,
                    const std::function<double(double, double, double)>& value,
                    const HjbGrid& grid);
double hjb_residual(const BlackScholesParams& bs, double gamma,
                    const std::function<double(double, double, double)>& value,
                    const HjbGrid& grid);

}  // namespace smallcost
