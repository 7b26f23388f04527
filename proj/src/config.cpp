#include "smallcost/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "smallcost/corrector.hpp"

namespace smallcost {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                         const std::string& record) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key()))
            throw ValidationError(record + ": unknown key \"" + it.key() + "\"");
    }
}

double get_number(const nlohmann::json& j, const std::string& key, const std::string& record) {
    if (!j.contains(key)) throw ValidationError(record + ": missing key \"" + key + "\"");
    if (!j.at(key).is_number())
        throw ValidationError(record + ": key \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

Eigen::VectorXd get_vector(const nlohmann::json& j, const std::string& key,
                           const std::string& record) {
    if (!j.contains(key)) throw ValidationError(record + ": missing key \"" + key + "\"");
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.empty())
        throw ValidationError(record + ": key \"" + key + "\" must be a nonempty array");
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ValidationError(record + ": key \"" + key + "\" must hold numbers");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

}  // namespace

SolveConfig solve_config_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"command", "market", "preferences", "cost", "solver", "output"},
                        "SolveConfig");
    if (j.contains("command") && j.at("command") != "solve")
        throw ValidationError("SolveConfig: command must be \"solve\"");

    SolveConfig cfg;
    if (!j.contains("market")) throw ValidationError("SolveConfig: missing key \"market\"");
    const auto& m = j.at("market");
    reject_unknown_keys(m, {"r", "mu", "sigma", "rho"}, "MarketConfig");
    cfg.market.r = m.contains("r") ? get_number(m, "r", "MarketConfig") : 0.0;
    cfg.market.mu = get_vector(m, "mu", "MarketConfig");
    cfg.market.sigma = get_vector(m, "sigma", "MarketConfig");
    cfg.market.rho = m.contains("rho") ? get_number(m, "rho", "MarketConfig") : 0.0;

    const auto d = cfg.market.mu.size();
    require(d == cfg.market.sigma.size(), "MarketConfig: mu and sigma must have equal length");
    require(d == 1 || d == 2, "MarketConfig: only one or two assets are supported");
    for (Eigen::Index i = 0; i < d; ++i)
        require(cfg.market.sigma(i) > 0.0, "MarketConfig: sigma entries must be positive");
    require(std::abs(cfg.market.rho) < 1.0, "MarketConfig: rho must lie in (-1, 1)");

    if (!j.contains("preferences"))
        throw ValidationError("SolveConfig: missing key \"preferences\"");
    const Preferences pref = preferences_from_json(j.at("preferences"));
    require(pref.gamma > 1.0, "SolveConfig: gamma must exceed 1");
    cfg.gamma = pref.gamma;

    if (!j.contains("cost")) throw ValidationError("SolveConfig: missing key \"cost\"");
    cfg.lambda_p = cost_from_json(j.at("cost")).lambda_p;

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        reject_unknown_keys(s, {"points_per_side", "domain_scale", "K", "tol", "max_iter"},
                            "SolverControls");
        if (s.contains("points_per_side"))
            cfg.solver.points_per_side = s.at("points_per_side").get<int>();
        if (s.contains("domain_scale"))
            cfg.solver.domain_scale = get_number(s, "domain_scale", "SolverControls");
        if (s.contains("K")) cfg.solver.K = get_number(s, "K", "SolverControls");
        if (s.contains("tol")) cfg.solver.tol = get_number(s, "tol", "SolverControls");
        if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
        require(cfg.solver.points_per_side >= 2, "SolverControls: points_per_side too small");
        require(cfg.solver.domain_scale > 0.0, "SolverControls: domain_scale must be positive");
        require(cfg.solver.K > 0.0, "SolverControls: K must be positive");
        require(cfg.solver.tol > 0.0, "SolverControls: tol must be positive");
        require(cfg.solver.max_iter >= 1, "SolverControls: max_iter must be at least 1");
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    return cfg;
}

SolveSetup build_solve_setup(const SolveConfig& cfg) {
    const auto d = cfg.market.mu.size();

    // Lower-triangular volatility matrix with the requested cross-correlation.
    Eigen::MatrixXd sigma_S = Eigen::MatrixXd::Zero(d, d);
    sigma_S(0, 0) = cfg.market.sigma(0);
    if (d == 2) {
        sigma_S(1, 0) = cfg.market.sigma(1) * cfg.market.rho;
        sigma_S(1, 1) = cfg.market.sigma(1) * std::sqrt(1.0 - cfg.market.rho * cfg.market.rho);
    }
    const Eigen::MatrixXd cov = sigma_S * sigma_S.transpose();

    SolveSetup setup;
    setup.gamma = cfg.gamma;
    setup.lambda_p = cfg.lambda_p;
    setup.pi = cov.ldlt().solve(cfg.market.mu) / cfg.gamma;

    const Eigen::MatrixXd alpha = build_alpha_matrix(setup.pi, setup.pi, sigma_S);
    setup.data = make_problem_data(alpha, sigma_S, 1.0, -cfg.gamma, cfg.solver.K);

    setup.domain_halfwidth.resize(d);
    std::vector<double> halfwidths(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double est = ntregion_power_coefficient(setup.pi(i), 0.0, cfg.gamma,
                                                      cfg.market.sigma(i), 0.0);
        if (est <= 0.0)
            throw ValidationError("SolveConfig: degenerate domain (pi at 0 or 1)");
        setup.domain_halfwidth(i) = cfg.solver.domain_scale * est;
        halfwidths[i] = setup.domain_halfwidth(i);
    }
    setup.grid = GridSpec::symmetric(halfwidths, cfg.solver.points_per_side);
    check_monotone_stencil(setup.data, setup.grid);
    return setup;
}

std::string config_hash(const nlohmann::json& j) {
    const std::string dump = j.dump();  // object keys are stored sorted
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config parse error in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace smallcost
