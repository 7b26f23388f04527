#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "smallcost/ergodic.hpp"
#include "smallcost/models.hpp"

namespace smallcost {

/// One- or two-asset constant-coefficient market for the ergodic solver.
struct MarketConfig {
    double r = 0.0;
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma;  // per-asset volatilities
    double rho = 0.0;       // cross-asset return correlation (d = 2)
};

struct SolverControls {
    int points_per_side = 100;
    double domain_scale = 3.0;  // domain half-width in units of the 1-D estimate
    double K = 100.0;
    double tol = 1e-9;  // relative to the first ergodic constant
    int max_iter = 200;
};

struct SolveConfig {
    MarketConfig market;
    double gamma = 2.0;
    double lambda_p = 0.01;
    SolverControls solver;
    std::string output = "solve";
};

SolveConfig solve_config_from_json(const nlohmann::json& j);

/// Everything the solver needs, in normalized weight-deviation units
/// (v_z = 1, v_zz = -gamma; the cost enters through a lambda^{1/3} rescale of
/// the extracted half-widths).
struct SolveSetup {
    ProblemData data;
    GridSpec grid;
    Eigen::VectorXd pi;              // frictionless weights
    Eigen::VectorXd domain_halfwidth;
    double gamma = 0.0;
    double lambda_p = 0.0;
};

SolveSetup build_solve_setup(const SolveConfig& cfg);

/// FNV-1a over the canonical (sorted-key) serialization; stable across runs.
std::string config_hash(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);

}  // namespace smallcost
