#include "smallcost/corrector.hpp"

#include <cmath>
#include <stdexcept>

namespace smallcost {

double alpha_squared(double theta, double theta_z, double theta_f, double sigma_S,
                     double sigma_F, double rho) {
    const double u = sigma_S * theta * (1.0 - theta_z);
    const double v = sigma_F * theta_f;
    return u * u - 2.0 * rho * u * v + v * v;
}

CorrectorSolution solve_corrector_1d(double v_z, double v_zz, double sigma_S, double alpha_sq) {
    if (v_z <= 0.0) throw ValidationError("v_z must be positive");
    if (v_zz >= 0.0) throw ValidationError("v_zz must be negative");
    if (sigma_S <= 0.0) throw ValidationError("sigma_S must be positive");
    if (alpha_sq < 0.0) throw ValidationError("alpha_sq must be nonnegative");

    CorrectorSolution sol;
    sol.v_z = v_z;
    sol.v_zz = v_zz;
    sol.alpha_sq = alpha_sq;
    if (alpha_sq == 0.0) return sol;  // degenerate corrector: empty region, w = 0

    const double s2 = sigma_S * sigma_S;
    sol.delta_xi = std::cbrt((-v_z / v_zz) * (3.0 * alpha_sq / (2.0 * s2)));
    sol.a = 0.5 * s2 * v_zz * sol.delta_xi * sol.delta_xi;
    sol.c4 = s2 * v_zz / (12.0 * alpha_sq);
    sol.c2 = -sol.a / alpha_sq;
    return sol;
}

double w_eval(const CorrectorSolution& sol, double xi) {
    const double dx = sol.delta_xi;
    if (dx == 0.0) return 0.0;
    const double ax = std::abs(xi);
    if (ax <= dx) {
        const double x2 = xi * xi;
        return sol.c4 * x2 * x2 + sol.c2 * x2;
    }
    const double w_edge = sol.c4 * dx * dx * dx * dx + sol.c2 * dx * dx;
    return w_edge + sol.v_z * (ax - dx);
}

double ntregion_power_coefficient(double pi, double pi_f, double gamma, double sigma_S,
                                  double sigma_F) {
    if (gamma <= 0.0) throw ValidationError("gamma must be positive");
    if (sigma_S <= 0.0) throw ValidationError("sigma_S must be positive");
    const double vr = sigma_F / sigma_S;
    const double q = pi * pi * (1.0 - pi) * (1.0 - pi) - 2.0 * pi * (1.0 - pi) * pi_f * vr +
                     pi_f * pi_f * vr * vr;
    return std::cbrt(std::max(0.0, 3.0 / (2.0 * gamma) * q));
}

NoTradeRegion ntregion_power(double pi, double pi_f, double gamma, double sigma_S,
                             double sigma_F, double lambda_p) {
    if (lambda_p <= 0.0 || lambda_p >= 1.0) throw ValidationError("lambda_p must lie in (0, 1)");
    NoTradeRegion nt;
    nt.center = pi;
    nt.halfwidth =
        std::cbrt(lambda_p) * ntregion_power_coefficient(pi, pi_f, gamma, sigma_S, sigma_F);
    nt.cost_lambda = lambda_p;
    nt.units = RegionUnits::Weight;
    return nt;
}

NoTradeRegion ko_ntregion(const KimOmbergParams& ko, double gamma, double T, double t, double f,
                          double lambda_p) {
    const KoWeight w = ko_weight(ko, gamma, T, t, f);
    return ntregion_power(w.pi, w.pi_f, gamma, ko.sigma_S, ko.sigma_F, lambda_p);
}

}  // namespace smallcost
