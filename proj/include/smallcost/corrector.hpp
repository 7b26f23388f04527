#pragma once

#include "smallcost/frictionless.hpp"
#include "smallcost/models.hpp"

namespace smallcost {

/// Closed-form solution of the one-dimensional first corrector equation at a
/// frozen frictionless state. Inside |xi| <= delta_xi the potential is
/// w(xi) = c4 xi^4 + c2 xi^2, normalized by w(0) = 0.
struct CorrectorSolution {
    double c2 = 0.0;
    double c4 = 0.0;
    double a = 0.0;         // ergodic constant, <= 0 when v_zz < 0
    double delta_xi = 0.0;  // half-width in normalized deviation units
    double alpha_sq = 0.0;
    double v_z = 0.0;
    double v_zz = 0.0;
};

enum class RegionUnits { Weight, Monetary };

/// Band around the frictionless target; halfwidth already carries the
/// lambda^{1/3} cost factor.
struct NoTradeRegion {
    double center = 0.0;
    double halfwidth = 0.0;
    double cost_lambda = 0.0;
    RegionUnits units = RegionUnits::Weight;

    double lower() const { return center - halfwidth; }
    double upper() const { return center + halfwidth; }
};

/// Diffusion coefficient of the normalized deviation process:
/// sigma_S^2 theta^2 (1-theta_z)^2 - 2 sigma_S sigma_F rho theta (1-theta_z) theta_f
/// + sigma_F^2 theta_f^2. Nonnegative for |rho| <= 1.
double alpha_squared(double theta, double theta_z, double theta_f, double sigma_S,
                     double sigma_F, double rho);

/// Requires v_z > 0, v_zz < 0, sigma_S > 0. alpha_sq = 0 is the degenerate
/// no-deviation limit and yields delta_xi = 0, a = 0, w identically 0.
CorrectorSolution solve_corrector_1d(double v_z, double v_zz, double sigma_S, double alpha_sq);

/// Quartic inside the band, C^1 linear continuation with slope +-v_z outside.
double w_eval(const CorrectorSolution& sol, double xi);

/// Cost-independent factor of the power-utility half-width, i.e. the
/// halfwidth with the lambda^{1/3} prefactor stripped.
double ntregion_power_coefficient(double pi, double pi_f, double gamma, double sigma_S,
                                  double sigma_F);

/// Power-utility no-trade half-width in weight units,
/// lambda^{1/3} ((3/(2 gamma)) (pi^2(1-pi)^2 - 2 pi(1-pi) pi_f vr + pi_f^2 vr^2))^{1/3}
/// with vr = sigma_F / sigma_S.
NoTradeRegion ntregion_power(double pi, double pi_f, double gamma, double sigma_S,
                             double sigma_F, double lambda_p);

/// Composes ko_weight with ntregion_power at (t, f).
NoTradeRegion ko_ntregion(const KimOmbergParams& ko, double gamma, double T, double t, double f,
                          double lambda_p);

}  // namespace smallcost
