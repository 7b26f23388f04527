#include "smallcost/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "smallcost/random.hpp"

namespace smallcost {

namespace {

constexpr double kPi = 3.14159265358979323846;

double mean_and_se(const std::vector<double>& xs, double& se_out) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() > 1 ? xs.size() - 1 : 1);
    se_out = std::sqrt(var / static_cast<double>(xs.size()));
    return mean;
}

// Adaptive Simpson with absolute tolerance.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol, int max_depth) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace

TiltedOUParams tilted_ou(const KimOmbergParams& ko, double gamma, const StationaryPolicy& sp) {
    validate(ko);
    const double sF2 = ko.sigma_F * ko.sigma_F;
    const double cross = (1.0 - gamma) * ko.sigma_F * ko.sigma_S * ko.rho;
    TiltedOUParams tp;
    tp.kappa_tilde = ko.kappa - cross * sp.pi_bar_slope - sp.C_bar * sF2;
    if (tp.kappa_tilde <= 0.0) throw std::domain_error("nonpositive tilted speed");
    tp.F_tilde = (ko.kappa * ko.F_bar + cross * sp.pi_bar_intercept + sp.B_bar * sF2) /
                 tp.kappa_tilde;
    return tp;
}

ESRLossResult esr_loss_bs(const BlackScholesParams& bs, double gamma, double lambda_p) {
    const double pi = merton_weight(bs, gamma);
    const double base = 3.0 * lambda_p / (2.0 * gamma) * pi * pi * (1.0 - pi) * (1.0 - pi);
    ESRLossResult res;
    res.delta_esr = 0.5 * gamma * bs.sigma * bs.sigma * std::cbrt(base * base);
    res.lambda_p = lambda_p;
    return res;
}

ESRLossResult esr_loss_ko(const KimOmbergParams& ko, double gamma, double lambda_p,
                          const QuadratureConfig& qc) {
    const StationaryPolicy sp = ko_stationary(ko, gamma);
    const TiltedOUParams tp = tilted_ou(ko, gamma, sp);
    const double var = ko.sigma_F * ko.sigma_F / (2.0 * tp.kappa_tilde);
    const double sd = std::sqrt(var);
    const double s2 = ko.sigma_S * ko.sigma_S;

    const auto integrand = [&](double f) {
        const double dpi =
            ntregion_power_coefficient(sp.pi_bar(f), sp.pi_bar_slope, gamma, ko.sigma_S,
                                       ko.sigma_F);
        const double density = std::exp(-0.5 * (f - tp.F_tilde) * (f - tp.F_tilde) / var) /
                               std::sqrt(2.0 * kPi * var);
        return dpi * dpi * s2 * density;
    };

    const double lo = tp.F_tilde - qc.truncation_sds * sd;
    const double hi = tp.F_tilde + qc.truncation_sds * sd;
    const double integral = integrate(integrand, lo, hi, qc.abs_tol, qc.max_depth);
    // Tail estimate: polynomial growth of the integrand is dominated by the
    // Gaussian factor beyond the truncation point.
    const double tail = (integrand(lo) + integrand(hi)) * sd;

    ESRLossResult res;
    res.delta_esr = std::cbrt(lambda_p * lambda_p) * 0.5 * gamma * integral;
    res.lambda_p = lambda_p;
    res.quadrature_error_estimate = 0.5 * gamma * (qc.abs_tol + tail);
    if (!std::isfinite(res.delta_esr)) throw std::runtime_error("quadrature did not converge");
    return res;
}

MCValue esr_loss_ko_mc(const KimOmbergParams& ko, double gamma, double lambda_p,
                       const MonteCarloConfig& mc, double horizon_years) {
    const StationaryPolicy sp = ko_stationary(ko, gamma);
    const TiltedOUParams tp = tilted_ou(ko, gamma, sp);
    const double sd = ko.sigma_F / std::sqrt(2.0 * tp.kappa_tilde);
    const double decay = std::exp(-tp.kappa_tilde * mc.dt);
    const double step_sd = sd * std::sqrt(1.0 - decay * decay);
    const double s2 = ko.sigma_S * ko.sigma_S;
    const int n_steps = static_cast<int>(std::llround(horizon_years / mc.dt));

    std::vector<double> per_path(mc.n_paths);
    for (int p = 0; p < mc.n_paths; ++p) {
        auto rng = rng_for_path(mc.seed, static_cast<std::uint64_t>(p));
        std::normal_distribution<double> normal(0.0, 1.0);
        double f = tp.F_tilde + sd * normal(rng);  // stationary start
        double acc = 0.0;
        for (int k = 0; k < n_steps; ++k) {
            const double dpi = ntregion_power_coefficient(sp.pi_bar(f), sp.pi_bar_slope, gamma,
                                                          ko.sigma_S, ko.sigma_F);
            acc += dpi * dpi * s2;
            f = tp.F_tilde + (f - tp.F_tilde) * decay + step_sd * normal(rng);
        }
        per_path[p] = acc / static_cast<double>(n_steps);
    }
    double se = 0.0;
    const double mean = mean_and_se(per_path, se);
    const double scale = std::cbrt(lambda_p * lambda_p) * 0.5 * gamma;
    return {scale * mean, scale * se};
}

CELResult cel_monte_carlo(const KimOmbergParams& ko, double gamma, double T, double lambda_p,
                          const MonteCarloConfig& mc) {
    validate(ko);
    if (T <= 0.0) throw ValidationError("T must be positive");
    const int n_steps = static_cast<int>(std::llround(T / mc.dt));
    const double s2 = ko.sigma_S * ko.sigma_S;
    const double sF2 = ko.sigma_F * ko.sigma_F;
    const double cross = (1.0 - gamma) * ko.sigma_F * ko.sigma_S * ko.rho;
    const double hedge = ko.rho * ko.sigma_F / (gamma * ko.sigma_S);

    // Precompute the time-dependent tilt and the weight coefficients per step.
    std::vector<double> pi0(n_steps), pif(n_steps), decay(n_steps), level(n_steps),
        step_sd(n_steps);
    for (int k = 0; k < n_steps; ++k) {
        const double s = k * mc.dt;
        const RiccatiCoefficients rc = ko_riccati(ko, gamma, T, s);
        pi0[k] = hedge * rc.B;
        pif[k] = 1.0 / (gamma * s2) + hedge * rc.C;
        const double q_lin = -ko.kappa + cross * pif[k] + rc.C * sF2;
        const double p_const = ko.kappa * ko.F_bar + cross * pi0[k] + rc.B * sF2;
        const double kappa_eff = -q_lin;
        if (kappa_eff <= 0.0) throw std::domain_error("nonpositive tilted speed");
        decay[k] = std::exp(-kappa_eff * mc.dt);
        level[k] = p_const / kappa_eff;
        step_sd[k] = ko.sigma_F * std::sqrt((1.0 - decay[k] * decay[k]) / (2.0 * kappa_eff));
    }

    std::vector<double> per_path(mc.n_paths);
    for (int p = 0; p < mc.n_paths; ++p) {
        auto rng = rng_for_path(mc.seed, static_cast<std::uint64_t>(p));
        std::normal_distribution<double> normal(0.0, 1.0);
        double f = ko.F_bar;
        double acc = 0.0;
        for (int k = 0; k < n_steps; ++k) {
            const double pi = pi0[k] + pif[k] * f;
            const double dpi =
                ntregion_power_coefficient(pi, pif[k], gamma, ko.sigma_S, ko.sigma_F);
            acc += 0.5 * gamma * s2 * dpi * dpi * mc.dt;
            f = level[k] + (f - level[k]) * decay[k] + step_sd[k] * normal(rng);
        }
        per_path[p] = acc;
    }
    double se = 0.0;
    const double mean = mean_and_se(per_path, se);
    const double scale = std::cbrt(lambda_p * lambda_p);
    CELResult res;
    res.cel = scale * mean;
    res.standard_error = scale * se;
    res.n_paths = mc.n_paths;
    res.n_steps = n_steps;
    return res;
}

MCValue second_corrector_u(const KimOmbergParams& ko, double gamma, double T, double t, double z,
                           double f, const MonteCarloConfig& mc) {
    validate(ko);
    if (t > T) throw ValidationError("t must not exceed T");
    if (z <= 0.0) throw ValidationError("z must be positive");
    const int n_steps = static_cast<int>(std::llround((T - t) / mc.dt));
    if (n_steps == 0) return {0.0, 0.0};

    // Per-step closed-form quantities.
    std::vector<RiccatiCoefficients> rcs(n_steps);
    for (int k = 0; k < n_steps; ++k) rcs[k] = ko_riccati(ko, gamma, T, t + k * mc.dt);
    const double s2 = ko.sigma_S * ko.sigma_S;
    const double hedge = ko.rho * ko.sigma_F / (gamma * ko.sigma_S);
    const double rho_c = std::sqrt(1.0 - ko.rho * ko.rho);
    const double sqdt = std::sqrt(mc.dt);

    std::vector<double> per_path(mc.n_paths);
    for (int p = 0; p < mc.n_paths; ++p) {
        auto rng = rng_for_path(mc.seed, static_cast<std::uint64_t>(p));
        std::normal_distribution<double> normal(0.0, 1.0);
        double Z = z, F = f, acc = 0.0;
        for (int k = 0; k < n_steps; ++k) {
            const auto& rc = rcs[k];
            const double pi = F / (gamma * s2) + hedge * (rc.B + rc.C * F);
            const double pi_f = 1.0 / (gamma * s2) + hedge * rc.C;
            const double v = std::pow(Z, 1.0 - gamma) / (1.0 - gamma) *
                             std::exp(rc.A + rc.B * F + 0.5 * rc.C * F * F);
            const double v_z = (1.0 - gamma) * v / Z;
            const double v_zz = -gamma * (1.0 - gamma) * v / (Z * Z);
            const double asq = std::max(
                0.0, alpha_squared(pi * Z, pi, pi_f * Z, ko.sigma_S, ko.sigma_F, ko.rho));
            const CorrectorSolution sol = solve_corrector_1d(v_z, v_zz, ko.sigma_S, asq);
            acc += -sol.a * mc.dt;

            const double zS = normal(rng);
            const double zF = ko.rho * zS + rho_c * normal(rng);
            Z *= std::exp((ko.r + pi * F - 0.5 * pi * pi * s2) * mc.dt +
                          pi * ko.sigma_S * sqdt * zS);
            F += ko.kappa * (ko.F_bar - F) * mc.dt + ko.sigma_F * sqdt * zF;
        }
        per_path[p] = acc;
    }
    double se = 0.0;
    const double mean = mean_and_se(per_path, se);
    return {mean, se};
}

MCValue second_corrector_u(const BlackScholesParams& bs, double gamma, double T, double t,
                           double z, const MonteCarloConfig& mc) {
    validate(bs);
    if (t > T) throw ValidationError("t must not exceed T");
    if (z <= 0.0) throw ValidationError("z must be positive");
    const int n_steps = static_cast<int>(std::llround((T - t) / mc.dt));
    if (n_steps == 0) return {0.0, 0.0};

    const double pi = merton_weight(bs, gamma);
    const double s2 = bs.sigma * bs.sigma;
    const double growth = (1.0 - gamma) * (bs.r + bs.mu * bs.mu / (2.0 * gamma * s2));
    const double sqdt = std::sqrt(mc.dt);

    std::vector<double> per_path(mc.n_paths);
    for (int p = 0; p < mc.n_paths; ++p) {
        auto rng = rng_for_path(mc.seed, static_cast<std::uint64_t>(p));
        std::normal_distribution<double> normal(0.0, 1.0);
        double Z = z, acc = 0.0;
        for (int k = 0; k < n_steps; ++k) {
            const double s = t + k * mc.dt;
            const double v = std::pow(Z, 1.0 - gamma) / (1.0 - gamma) *
                             std::exp(growth * (T - s));
            const double v_z = (1.0 - gamma) * v / Z;
            const double v_zz = -gamma * (1.0 - gamma) * v / (Z * Z);
            const double asq = alpha_squared(pi * Z, pi, 0.0, bs.sigma, 0.0, 0.0);
            const CorrectorSolution sol = solve_corrector_1d(v_z, v_zz, bs.sigma, asq);
            acc += -sol.a * mc.dt;
            Z *= std::exp((bs.r + pi * bs.mu - 0.5 * pi * pi * s2) * mc.dt +
                          pi * bs.sigma * sqdt * normal(rng));
        }
        per_path[p] = acc;
    }
    double se = 0.0;
    const double mean = mean_and_se(per_path, se);
    return {mean, se};
}

}  // namespace smallcost
