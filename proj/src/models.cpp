#include "smallcost/models.hpp"

#include <cmath>
#include <set>

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
    if (!j.at(key).is_number()) throw ValidationError(record + ": key \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

}  // namespace

const BlackScholesParams& validate(const BlackScholesParams& p) {
    require(std::isfinite(p.r), "r must be finite");
    require(std::isfinite(p.mu), "mu must be finite");
    require(p.sigma > 0.0 && std::isfinite(p.sigma), "sigma must be positive");
    return p;
}

const KimOmbergParams& validate(const KimOmbergParams& p) {
    require(std::isfinite(p.r), "r must be finite");
    require(p.sigma_S > 0.0 && std::isfinite(p.sigma_S), "sigma_S must be positive");
    require(p.kappa > 0.0 && std::isfinite(p.kappa), "kappa must be positive");
    require(std::isfinite(p.F_bar), "F_bar must be finite");
    require(p.sigma_F > 0.0 && std::isfinite(p.sigma_F), "sigma_F must be positive");
    require(std::abs(p.rho) <= 1.0, "rho must lie in [-1, 1]");
    return p;
}

const Preferences& validate(const Preferences& p) {
    require(p.gamma > 0.0 && std::isfinite(p.gamma), "gamma must be positive");
    require(p.gamma != 1.0, "gamma must differ from 1");
    if (p.horizon_T) require(*p.horizon_T > 0.0, "horizon_T must be positive");
    if (p.delta) require(*p.delta > 0.0, "delta must be positive");
    return p;
}

const CostSpec& validate(const CostSpec& p) {
    require(p.lambda_p > 0.0 && p.lambda_p < 1.0, "lambda_p must lie in (0, 1)");
    if (p.lambda_f) require(*p.lambda_f >= 0.0, "lambda_f must be nonnegative");
    return p;
}

nlohmann::json to_json(const BlackScholesParams& p) {
    return {{"r", p.r}, {"mu", p.mu}, {"sigma", p.sigma}};
}

nlohmann::json to_json(const KimOmbergParams& p) {
    return {{"r", p.r},       {"sigma_S", p.sigma_S}, {"kappa", p.kappa},
            {"F_bar", p.F_bar}, {"sigma_F", p.sigma_F}, {"rho", p.rho}};
}

nlohmann::json to_json(const Preferences& p) {
    nlohmann::json j{{"gamma", p.gamma}};
    if (p.horizon_T) j["horizon_T"] = *p.horizon_T;
    if (p.delta) j["delta"] = *p.delta;
    return j;
}

nlohmann::json to_json(const CostSpec& p) {
    nlohmann::json j{{"lambda_p", p.lambda_p}};
    if (p.lambda_f) j["lambda_f"] = *p.lambda_f;
    return j;
}

BlackScholesParams bs_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"r", "mu", "sigma"}, "BlackScholesParams");
    BlackScholesParams p;
    p.r = get_number(j, "r", "BlackScholesParams");
    p.mu = get_number(j, "mu", "BlackScholesParams");
    p.sigma = get_number(j, "sigma", "BlackScholesParams");
    validate(p);
    return p;
}

KimOmbergParams ko_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"r", "sigma_S", "kappa", "F_bar", "sigma_F", "rho"}, "KimOmbergParams");
    KimOmbergParams p;
    p.r = get_number(j, "r", "KimOmbergParams");
    p.sigma_S = get_number(j, "sigma_S", "KimOmbergParams");
    p.kappa = get_number(j, "kappa", "KimOmbergParams");
    p.F_bar = get_number(j, "F_bar", "KimOmbergParams");
    p.sigma_F = get_number(j, "sigma_F", "KimOmbergParams");
    // rho defaults to 0 (uncorrelated factor) when omitted.
    p.rho = j.contains("rho") ? get_number(j, "rho", "KimOmbergParams") : 0.0;
    validate(p);
    return p;
}

Preferences preferences_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"gamma", "horizon_T", "delta"}, "Preferences");
    Preferences p;
    p.gamma = get_number(j, "gamma", "Preferences");
    if (j.contains("horizon_T")) p.horizon_T = get_number(j, "horizon_T", "Preferences");
    if (j.contains("delta")) p.delta = get_number(j, "delta", "Preferences");
    validate(p);
    return p;
}

CostSpec cost_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"lambda_p", "lambda_f"}, "CostSpec");
    CostSpec p;
    p.lambda_p = get_number(j, "lambda_p", "CostSpec");
    if (j.contains("lambda_f")) p.lambda_f = get_number(j, "lambda_f", "CostSpec");
    validate(p);
    return p;
}

}  // namespace smallcost
