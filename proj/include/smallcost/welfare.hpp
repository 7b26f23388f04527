#pragma once

#include <cstdint>

#include "smallcost/corrector.hpp"
#include "smallcost/frictionless.hpp"
#include "smallcost/models.hpp"

namespace smallcost {

/// Ornstein-Uhlenbeck coefficients of the factor under the long-run tilted
/// measure; stationary law is N(F_tilde, sigma_F^2 / (2 kappa_tilde)).
struct TiltedOUParams {
    double kappa_tilde = 0.0;
    double F_tilde = 0.0;
};

struct ESRLossResult {
    double delta_esr = 0.0;  // per year
    double lambda_p = 0.0;
    double quadrature_error_estimate = 0.0;
};

struct CELResult {
    double cel = 0.0;  // wealth-relative (z = 1)
    double standard_error = 0.0;
    int n_paths = 0;
    int n_steps = 0;
};

/// Monte Carlo estimate with a cross-path standard error.
struct MCValue {
    double value = 0.0;
    double standard_error = 0.0;
};

struct MonteCarloConfig {
    std::uint64_t seed = 1;
    double dt = 1.0 / 250.0;
    int n_paths = 256;
};

struct QuadratureConfig {
    double abs_tol = 1e-12;
    int max_depth = 40;
    double truncation_sds = 8.0;
};

/// Matches the affine long-run drift of the factor under the tilted measure to
/// kappa_tilde (F_tilde - F). Throws on kappa_tilde <= 0.
TiltedOUParams tilted_ou(const KimOmbergParams& ko, double gamma, const StationaryPolicy& sp);

/// (gamma sigma^2 / 2) ((3 lambda / (2 gamma)) pi^2 (1-pi)^2)^{2/3}.
ESRLossResult esr_loss_bs(const BlackScholesParams& bs, double gamma, double lambda_p);

/// Gaussian quadrature of the stationary loss rate under the tilted law.
ESRLossResult esr_loss_ko(const KimOmbergParams& ko, double gamma, double lambda_p,
                          const QuadratureConfig& qc = {});

/// Simulation-based counterpart of esr_loss_ko: time-averages the loss-rate
/// integrand along stationary tilted-measure factor paths. Independent code
/// path, used to cross-check the quadrature.
MCValue esr_loss_ko_mc(const KimOmbergParams& ko, double gamma, double lambda_p,
                       const MonteCarloConfig& mc, double horizon_years = 200.0);

/// Wealth-relative certainty equivalent loss over [0, T] by Monte Carlo under
/// the time-dependent tilted measure.
CELResult cel_monte_carlo(const KimOmbergParams& ko, double gamma, double T, double lambda_p,
                          const MonteCarloConfig& mc);

/// Second corrector function u(t,z,f) = E_t[ integral of -a ] along frictionless
/// optimal wealth/factor paths; u(T,.,.) = 0.
MCValue second_corrector_u(const KimOmbergParams& ko, double gamma, double T, double t, double z,
                           double f, const MonteCarloConfig& mc);
MCValue second_corrector_u(const BlackScholesParams& bs, double gamma, double T, double t,
                           double z, const MonteCarloConfig& mc);

}  // namespace smallcost
