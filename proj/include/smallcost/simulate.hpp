#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "smallcost/corrector.hpp"
#include "smallcost/models.hpp"

namespace smallcost {

struct PathConfig {
    std::uint64_t seed = 0;
    double dt = 1.0 / 2520.0;  // 10 steps per trading day
    double T = 1.0;
    int n_paths = 1;
};

const PathConfig& validate(const PathConfig& cfg);

/// Time series of one simulated frictional trading experiment. All transfer
/// quantities are in wealth fractions; L (buys) and M (sells) are cumulative
/// and nondecreasing.
struct FrictionalPath {
    std::vector<double> times;
    std::vector<double> factor;
    std::vector<double> pi;      // frictionless weight
    std::vector<double> lower;   // region bound
    std::vector<double> upper;
    std::vector<double> weight;  // frictional weight after projection
    std::vector<double> L;
    std::vector<double> M;
    int trade_count = 0;
    bool bankrupt = false;
};

struct TradingStats {
    double turnover = 0.0;       // L_T + M_T
    int trades = 0;
    double max_deviation = 0.0;  // max |weight - center|
    double boundary_fraction = 0.0;
};

/// Exact Ornstein-Uhlenbeck transition sampling of the factor; one path per
/// deterministically derived per-path seed.
std::vector<std::vector<double>> simulate_factor(const KimOmbergParams& ko,
                                                 const PathConfig& cfg);

/// Minimal trading to stay inside the asymptotic no-trade region; the
/// frictional state is tracked as a risky weight. When deduct_costs is set,
/// wealth is reduced by lambda * |trade| at each rebalancing.
FrictionalPath simulate_proportional(const KimOmbergParams& ko, double gamma, double T,
                                     double lambda_p, const PathConfig& cfg,
                                     bool deduct_costs = true);

/// Rebalance all the way to the frictionless target whenever the weight exits
/// [pi - h, pi + h]; h is externally supplied (its formula is out of scope).
FrictionalPath simulate_fixed(const KimOmbergParams& ko, double gamma, double T,
                              const std::function<double(double, double)>& halfwidth_fn,
                              const PathConfig& cfg);

TradingStats trading_stats(const FrictionalPath& path);

/// CSV columns: time, factor, pi, lower, upper, weight, L, M, trades.
void write_path_csv(const FrictionalPath& path, std::ostream& os,
                    const std::string& config_hash = {});

}  // namespace smallcost
