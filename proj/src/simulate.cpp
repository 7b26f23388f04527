#include "smallcost/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smallcost/random.hpp"

namespace smallcost {

const PathConfig& validate(const PathConfig& cfg) {
    if (cfg.dt <= 0.0) throw ValidationError("dt must be positive");
    if (cfg.T <= 0.0) throw ValidationError("T must be positive");
    if (cfg.n_paths < 1) throw ValidationError("n_paths must be at least 1");
    return cfg;
}

std::vector<std::vector<double>> simulate_factor(const KimOmbergParams& ko,
                                                 const PathConfig& cfg) {
    validate(ko);
    validate(cfg);
    const int n_steps = static_cast<int>(std::llround(cfg.T / cfg.dt));
    const double decay = std::exp(-ko.kappa * cfg.dt);
    const double step_sd =
        ko.sigma_F * std::sqrt((1.0 - decay * decay) / (2.0 * ko.kappa));

    std::vector<std::vector<double>> paths(cfg.n_paths);
    for (int p = 0; p < cfg.n_paths; ++p) {
        auto rng = rng_for_path(cfg.seed, static_cast<std::uint64_t>(p));
        std::normal_distribution<double> normal(0.0, 1.0);
        auto& path = paths[p];
        path.reserve(n_steps + 1);
        double f = ko.F_bar;
        path.push_back(f);
        for (int k = 0; k < n_steps; ++k) {
            f = ko.F_bar + (f - ko.F_bar) * decay + step_sd * normal(rng);
            path.push_back(f);
        }
    }
    return paths;
}

namespace {

// Shared weight-dynamics loop. The projection callback receives the
// uncontrolled weight and the current (center, region) and returns the
// post-trade weight, recording transfers.
template <typename Project>
FrictionalPath run_frictional(const KimOmbergParams& ko, double T,
                              const PathConfig& cfg, const Project& project,
                              const std::function<NoTradeRegion(double, double)>& region_fn) {
    validate(ko);
    validate(cfg);
    if (cfg.T > T) throw ValidationError("simulated length T must not exceed the horizon");
    const int n_steps = static_cast<int>(std::llround(cfg.T / cfg.dt));
    const double decay = std::exp(-ko.kappa * cfg.dt);
    const double step_sd = ko.sigma_F * std::sqrt((1.0 - decay * decay) / (2.0 * ko.kappa));
    const double rho_c = std::sqrt(1.0 - ko.rho * ko.rho);
    const double sqdt = std::sqrt(cfg.dt);

    auto rng = rng_for_path(cfg.seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);

    FrictionalPath path;
    path.times.reserve(n_steps + 1);

    double f = ko.F_bar;
    NoTradeRegion nt = region_fn(0.0, f);
    double w = nt.center;  // start at the frictionless target
    double wealth = 1.0;
    double L = 0.0, M = 0.0;

    auto record = [&](double t) {
        path.times.push_back(t);
        path.factor.push_back(f);
        path.pi.push_back(nt.center);
        path.lower.push_back(nt.lower());
        path.upper.push_back(nt.upper());
        path.weight.push_back(w);
        path.L.push_back(L);
        path.M.push_back(M);
    };
    record(0.0);

    for (int k = 0; k < n_steps; ++k) {
        const double zS = normal(rng);
        const double zF = ko.rho * zS + rho_c * normal(rng);

        const double dR = f * cfg.dt + ko.sigma_S * sqdt * zS;  // excess risky return
        const double port = 1.0 + ko.r * cfg.dt + w * dR;
        wealth *= port;
        w = w * (1.0 + ko.r * cfg.dt + dR) / port;
        f = ko.F_bar + (f - ko.F_bar) * decay + step_sd * zF;

        const double t = (k + 1) * cfg.dt;
        nt = region_fn(t, f);
        w = project(w, nt, L, M, wealth, path.trade_count);

        if (wealth <= 0.0) {
            path.bankrupt = true;
            record(t);
            break;
        }
        record(t);
    }
    return path;
}

}  // namespace

FrictionalPath simulate_proportional(const KimOmbergParams& ko, double gamma, double T,
                                     double lambda_p, const PathConfig& cfg,
                                     bool deduct_costs) {
    if (lambda_p <= 0.0 || lambda_p >= 1.0) throw ValidationError("lambda_p must lie in (0, 1)");
    auto region_fn = [&](double t, double f) { return ko_ntregion(ko, gamma, T, t, f, lambda_p); };
    auto project = [&](double w, const NoTradeRegion& nt, double& L, double& M, double& wealth,
                       int& trades) {
        if (w > nt.upper()) {
            const double trade = w - nt.upper();
            M += trade;
            if (deduct_costs) wealth *= 1.0 - lambda_p * trade;
            ++trades;
            return nt.upper();
        }
        if (w < nt.lower()) {
            const double trade = nt.lower() - w;
            L += trade;
            if (deduct_costs) wealth *= 1.0 - lambda_p * trade;
            ++trades;
            return nt.lower();
        }
        return w;
    };
    return run_frictional(ko, T, cfg, project, region_fn);
}

FrictionalPath simulate_fixed(const KimOmbergParams& ko, double gamma, double T,
                              const std::function<double(double, double)>& halfwidth_fn,
                              const PathConfig& cfg) {
    auto region_fn = [&](double t, double f) {
        const KoWeight kw = ko_weight(ko, gamma, T, t, f);
        NoTradeRegion nt;
        nt.center = kw.pi;
        nt.halfwidth = halfwidth_fn(t, f);
        nt.units = RegionUnits::Weight;
        if (nt.halfwidth < 0.0) throw ValidationError("halfwidth_fn must be nonnegative");
        return nt;
    };
    auto project = [&](double w, const NoTradeRegion& nt, double& L, double& M, double& wealth,
                       int& trades) {
        (void)wealth;
        if (w > nt.upper() || w < nt.lower()) {
            const double trade = std::abs(w - nt.center);
            (w < nt.center ? L : M) += trade;
            ++trades;
            return nt.center;  // rebalance all the way back to the target
        }
        return w;
    };
    return run_frictional(ko, T, cfg, project, region_fn);
}

TradingStats trading_stats(const FrictionalPath& path) {
    TradingStats st;
    st.trades = path.trade_count;
    if (path.times.empty()) return st;
    st.turnover = path.L.back() + path.M.back();
    int at_boundary = 0;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        st.max_deviation = std::max(st.max_deviation, std::abs(path.weight[i] - path.pi[i]));
        if (path.weight[i] == path.lower[i] || path.weight[i] == path.upper[i]) ++at_boundary;
    }
    st.boundary_fraction = static_cast<double>(at_boundary) /
                           static_cast<double>(path.times.size());
    return st;
}

void write_path_csv(const FrictionalPath& path, std::ostream& os,
                    const std::string& config_hash) {
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << "\n";
    os << "time,factor,pi,lower,upper,weight,L,M,trades\n";
    os.precision(12);
    int trades_so_far = 0;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        // Reconstruct the running trade count from the transfer increments.
        if (i > 0 && (path.L[i] > path.L[i - 1] || path.M[i] > path.M[i - 1])) ++trades_so_far;
        os << path.times[i] << ',' << path.factor[i] << ',' << path.pi[i] << ','
           << path.lower[i] << ',' << path.upper[i] << ',' << path.weight[i] << ','
           << path.L[i] << ',' << path.M[i] << ',' << trades_so_far << "\n";
    }
}

}  // namespace smallcost
