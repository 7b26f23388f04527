#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace smallcost {

/// Constant-coefficient market: safe rate r, excess return mu, volatility sigma.
struct BlackScholesParams {
    double r = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
};

/// Mean-reverting expected excess return: dF = kappa (F_bar - F) dt + sigma_F dW^F,
/// with corr(W^S, W^F) = rho.
struct KimOmbergParams {
    double r = 0.0;
    double sigma_S = 0.0;
    double kappa = 0.0;
    double F_bar = 0.0;
    double sigma_F = 0.0;
    double rho = 0.0;
};

/// Power utility x^{1-gamma}/(1-gamma); horizon and impatience rate are optional
/// and only consumed by finite-horizon / consumption-style computations.
struct Preferences {
    double gamma = 0.0;
    std::optional<double> horizon_T;
    std::optional<double> delta;
};

struct CostSpec {
    double lambda_p = 0.0;
    std::optional<double> lambda_f;
};

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

const BlackScholesParams& validate(const BlackScholesParams& p);
const KimOmbergParams& validate(const KimOmbergParams& p);
const Preferences& validate(const Preferences& p);
const CostSpec& validate(const CostSpec& p);

// Flat JSON (de)serialization. Unknown keys are an error so that typos in
// experiment configs fail loudly instead of silently taking defaults.
nlohmann::json to_json(const BlackScholesParams& p);
nlohmann::json to_json(const KimOmbergParams& p);
nlohmann::json to_json(const Preferences& p);
nlohmann::json to_json(const CostSpec& p);

BlackScholesParams bs_from_json(const nlohmann::json& j);
KimOmbergParams ko_from_json(const nlohmann::json& j);
Preferences preferences_from_json(const nlohmann::json& j);
CostSpec cost_from_json(const nlohmann::json& j);

}  // namespace smallcost
