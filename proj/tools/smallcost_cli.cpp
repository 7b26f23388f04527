// Command-line front end: every run is a JSON config in, data files out.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "smallcost/config.hpp"
#include "smallcost/corrector.hpp"
#include "smallcost/ergodic.hpp"
#include "smallcost/frictionless.hpp"
#include "smallcost/models.hpp"
#include "smallcost/simulate.hpp"
#include "smallcost/welfare.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace smallcost;

namespace {

struct RunContext {
    json config;
    std::string hash;
    fs::path out_dir;
    std::optional<std::uint64_t> seed_override;
    std::vector<std::string> written;
};

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& record) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key()))
            throw ValidationError(record + ": unknown key \"" + it.key() + "\"");
    }
}

const json& need(const json& j, const std::string& key, const std::string& record) {
    if (!j.contains(key)) throw ValidationError(record + ": missing key \"" + key + "\"");
    return j.at(key);
}

// Model block: {"type": "ko" | "bs", ...parameters}.
std::string model_type(const json& m) {
    const std::string type = need(m, "type", "model").get<std::string>();
    if (type != "ko" && type != "bs")
        throw ValidationError("model: type must be \"ko\" or \"bs\"");
    return type;
}

json model_params(const json& m) {
    json p = m;
    p.erase("type");
    return p;
}

std::ofstream open_output(RunContext& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    const fs::path path = ctx.out_dir / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os.precision(12);
    ctx.written.push_back(path.string());
    return os;
}

void finish(const RunContext& ctx) {
    for (const auto& path : ctx.written) std::cout << "wrote " << path << "\n";
}

double linspace_at(double lo, double hi, int n, int i) {
    return n > 1 ? lo + (hi - lo) * i / (n - 1.0) : lo;
}

// --- commands ---------------------------------------------------------------

void cmd_ntregion(RunContext& ctx) {
    const json& j = ctx.config;
    reject_unknown_keys(j, {"command", "model", "preferences", "cost", "sweep", "output"},
                        "ntregion config");
    const json& model = need(j, "model", "ntregion config");
    const Preferences pref = preferences_from_json(need(j, "preferences", "ntregion config"));
    const CostSpec cost = cost_from_json(need(j, "cost", "ntregion config"));
    const json& sweep = need(j, "sweep", "ntregion config");
    const std::string output = j.value("output", std::string("ntregion"));

    auto os = open_output(ctx, output + ".csv");
    os << "# config_hash=" << ctx.hash << "\n";

    if (model_type(model) == "ko") {
        const KimOmbergParams ko = ko_from_json(model_params(model));
        if (!pref.horizon_T) throw ValidationError("ntregion config: horizon_T required");
        reject_unknown_keys(sweep, {"f_min", "f_max", "points", "t"}, "sweep");
        const double f_min = need(sweep, "f_min", "sweep").get<double>();
        const double f_max = need(sweep, "f_max", "sweep").get<double>();
        const int points = need(sweep, "points", "sweep").get<int>();
        const double t = sweep.value("t", 0.0);
        os << "f,pi,halfwidth,lower,upper\n";
        for (int i = 0; i < points; ++i) {
            const double f = linspace_at(f_min, f_max, points, i);
            const NoTradeRegion nt = ko_ntregion(ko, pref.gamma, *pref.horizon_T, t, f,
                                                 cost.lambda_p);
            os << f << ',' << nt.center << ',' << nt.halfwidth << ',' << nt.lower() << ','
               << nt.upper() << "\n";
        }
    } else {
        const BlackScholesParams bs = bs_from_json(model_params(model));
        reject_unknown_keys(sweep, {"pi_min", "pi_max", "points"}, "sweep");
        const double pi_min = need(sweep, "pi_min", "sweep").get<double>();
        const double pi_max = need(sweep, "pi_max", "sweep").get<double>();
        const int points = need(sweep, "points", "sweep").get<int>();
        os << "pi,halfwidth,lower,upper\n";
        for (int i = 0; i < points; ++i) {
            const double pi = linspace_at(pi_min, pi_max, points, i);
            const NoTradeRegion nt =
                ntregion_power(pi, 0.0, pref.gamma, bs.sigma, 0.0, cost.lambda_p);
            os << pi << ',' << nt.halfwidth << ',' << nt.lower() << ',' << nt.upper() << "\n";
        }
    }
    finish(ctx);
}

void cmd_simulate(RunContext& ctx) {
    const json& j = ctx.config;
    reject_unknown_keys(j,
                        {"command", "model", "preferences", "cost", "policy", "fixed_halfwidth",
                         "path", "output"},
                        "simulate config");
    const json& model = need(j, "model", "simulate config");
    if (model_type(model) != "ko")
        throw ValidationError("simulate config: only the \"ko\" model is supported");
    const KimOmbergParams ko = ko_from_json(model_params(model));
    const Preferences pref = preferences_from_json(need(j, "preferences", "simulate config"));
    if (!pref.horizon_T) throw ValidationError("simulate config: horizon_T required");
    const CostSpec cost = cost_from_json(need(j, "cost", "simulate config"));
    const std::string policy = need(j, "policy", "simulate config").get<std::string>();
    const std::string output = j.value("output", std::string("simulate"));

    const json& path_block = need(j, "path", "simulate config");
    reject_unknown_keys(path_block, {"seed", "dt", "T", "n_paths"}, "path");
    PathConfig cfg;
    cfg.seed = path_block.value("seed", std::uint64_t{0});
    cfg.dt = path_block.value("dt", cfg.dt);
    cfg.T = need(path_block, "T", "path").get<double>();
    if (ctx.seed_override) cfg.seed = *ctx.seed_override;
    validate(cfg);

    FrictionalPath result;
    if (policy == "proportional") {
        result = simulate_proportional(ko, pref.gamma, *pref.horizon_T, cost.lambda_p, cfg);
    } else if (policy == "fixed") {
        const double hw = need(j, "fixed_halfwidth", "simulate config").get<double>();
        result = simulate_fixed(ko, pref.gamma, *pref.horizon_T,
                                [hw](double, double) { return hw; }, cfg);
    } else {
        throw ValidationError("simulate config: policy must be \"proportional\" or \"fixed\"");
    }

    auto os = open_output(ctx, output + ".csv");
    write_path_csv(result, os, ctx.hash);
    finish(ctx);
}

void cmd_welfare(RunContext& ctx) {
    const json& j = ctx.config;
    reject_unknown_keys(j, {"command", "models", "preferences", "lambdas", "cel", "output"},
                        "welfare config");
    const json& models = need(j, "models", "welfare config");
    reject_unknown_keys(models, {"ko", "bs"}, "models");
    std::optional<KimOmbergParams> ko;
    std::optional<BlackScholesParams> bs;
    if (models.contains("ko")) ko = ko_from_json(models.at("ko"));
    if (models.contains("bs")) bs = bs_from_json(models.at("bs"));
    if (!ko && !bs) throw ValidationError("welfare config: at least one model required");
    const Preferences pref = preferences_from_json(need(j, "preferences", "welfare config"));
    const std::string output = j.value("output", std::string("welfare"));

    std::vector<double> lambdas;
    for (const auto& l : need(j, "lambdas", "welfare config")) {
        const double lambda = l.get<double>();
        if (lambda < 0.0 || lambda >= 1.0)
            throw ValidationError("welfare config: lambdas must lie in [0, 1)");
        lambdas.push_back(lambda);
    }

    json report;
    report["config_hash"] = ctx.hash;
    report["gamma"] = pref.gamma;
    report["esr"] = json::array();

    auto csv = open_output(ctx, output + ".csv");
    csv << "# config_hash=" << ctx.hash << "\n";
    csv << "lambda";
    if (ko) csv << ",delta_esr_ko";
    if (bs) csv << ",delta_esr_bs";
    csv << "\n";
    for (double lambda : lambdas) {
        json row{{"lambda", lambda}};
        csv << lambda;
        if (ko) {
            const double v = lambda == 0.0 ? 0.0
                                           : esr_loss_ko(*ko, pref.gamma, lambda).delta_esr;
            row["delta_esr_ko"] = v;
            csv << ',' << v;
        }
        if (bs) {
            const double v = lambda == 0.0 ? 0.0
                                           : esr_loss_bs(*bs, pref.gamma, lambda).delta_esr;
            row["delta_esr_bs"] = v;
            csv << ',' << v;
        }
        csv << "\n";
        report["esr"].push_back(row);
    }

    if (j.contains("cel")) {
        if (!ko) throw ValidationError("welfare config: cel requires the ko model");
        const json& cel_block = j.at("cel");
        reject_unknown_keys(cel_block, {"T", "dt", "n_paths", "seed", "lambda_p"}, "cel");
        MonteCarloConfig mc;
        mc.dt = cel_block.value("dt", mc.dt);
        mc.n_paths = cel_block.value("n_paths", mc.n_paths);
        mc.seed = cel_block.value("seed", mc.seed);
        if (ctx.seed_override) mc.seed = *ctx.seed_override;
        const double T = need(cel_block, "T", "cel").get<double>();
        const double lambda_p = cel_block.contains("lambda_p")
                                    ? cel_block.at("lambda_p").get<double>()
                                    : (lambdas.empty() ? 0.01 : lambdas.back());
        const CELResult cel = cel_monte_carlo(*ko, pref.gamma, T, lambda_p, mc);
        report["cel"] = {{"T", T},
                         {"lambda_p", lambda_p},
                         {"value", cel.cel},
                         {"standard_error", cel.standard_error},
                         {"n_paths", cel.n_paths},
                         {"n_steps", cel.n_steps}};
    }

    auto os = open_output(ctx, output + ".json");
    os << report.dump(2) << "\n";
    finish(ctx);
}

void cmd_solve(RunContext& ctx) {
    const SolveConfig cfg = solve_config_from_json(ctx.config);
    const SolveSetup setup = build_solve_setup(cfg);
    const ErgodicSolution sol =
        policy_iteration(setup.data, setup.grid, cfg.solver.tol, cfg.solver.max_iter);
    const RegionDescription region = extract_no_trade_region(sol, setup.grid);
    // lambda_p in solve configs is the full bid-ask spread; each one-way trade
    // pays half of it, so the half-spread drives the cube-root rescaling.
    const double scale = std::cbrt(0.5 * setup.lambda_p);
    const int d = setup.grid.d;

    auto csv = open_output(ctx, cfg.output + ".csv");
    csv << "# config_hash=" << ctx.hash << "\n";
    csv << (d == 1 ? "xi1,code\n" : "xi1,xi2,code\n");
    std::vector<int> idx;
    for (long r = 0; r < setup.grid.total_points(); ++r) {
        idx = setup.grid.unflat(r);
        for (int i = 0; i < d; ++i) csv << setup.grid.coord(i, idx[i]) << ',';
        csv << region.mask[r] << "\n";
    }

    json diag;
    diag["config_hash"] = ctx.hash;
    diag["a"] = sol.a;
    diag["iterations"] = sol.iterations;
    diag["a_history"] = sol.a_history;
    diag["lambda_p"] = setup.lambda_p;
    for (int i = 0; i < d; ++i) {
        json asset;
        asset["pi"] = setup.pi(i);
        asset["halfwidth_normalized"] =
            0.5 * (region.halfwidth_pos[i] + region.halfwidth_neg[i]);
        asset["halfwidth"] = scale * asset["halfwidth_normalized"].get<double>();
        asset["grid_step"] = setup.grid.h[i];
        asset["domain_halfwidth"] = setup.domain_halfwidth(i);
        diag["assets"].push_back(asset);
    }
    if (d == 1) {
        const double closed = ntregion_power_coefficient(setup.pi(0), 0.0, setup.gamma,
                                                         cfg.market.sigma(0), 0.0);
        const double solved = diag["assets"][0]["halfwidth_normalized"].get<double>();
        const double deviation = std::abs(solved - closed) / closed;
        diag["closed_form_halfwidth_normalized"] = closed;
        diag["closed_form_deviation"] = deviation;
        std::cout << "solver vs closed form: half-width " << solved << " vs " << closed
                  << " (deviation " << 100.0 * deviation << "%)\n";
    }

    auto os = open_output(ctx, cfg.output + ".json");
    os << diag.dump(2) << "\n";
    finish(ctx);
}

void cmd_convergence(RunContext& ctx) {
    const json& j = ctx.config;
    reject_unknown_keys(j, {"command", "model", "preferences", "cost", "points", "output"},
                        "convergence config");
    const json& model = need(j, "model", "convergence config");
    if (model_type(model) != "ko")
        throw ValidationError("convergence config: only the \"ko\" model is supported");
    const KimOmbergParams ko = ko_from_json(model_params(model));
    const Preferences pref = preferences_from_json(need(j, "preferences", "convergence config"));
    if (!pref.horizon_T) throw ValidationError("convergence config: horizon_T required");
    const CostSpec cost = cost_from_json(need(j, "cost", "convergence config"));
    const int points = j.value("points", 200);
    if (points < 2) throw ValidationError("convergence config: points must be at least 2");
    const std::string output = j.value("output", std::string("convergence"));

    const double T = *pref.horizon_T;
    const StationaryPolicy sp = ko_stationary(ko, pref.gamma);
    const double pi_stat = sp.pi_bar(ko.F_bar);
    const NoTradeRegion nt_stat = ntregion_power(pi_stat, sp.pi_bar_slope, pref.gamma,
                                                 ko.sigma_S, ko.sigma_F, cost.lambda_p);

    auto os = open_output(ctx, output + ".csv");
    os << "# config_hash=" << ctx.hash << "\n";
    os << "t,pi,lower,upper,pi_stationary,lower_stationary,upper_stationary\n";
    for (int i = 0; i < points; ++i) {
        const double t = linspace_at(0.0, T, points, i);
        const NoTradeRegion nt = ko_ntregion(ko, pref.gamma, T, t, ko.F_bar, cost.lambda_p);
        os << t << ',' << nt.center << ',' << nt.lower() << ',' << nt.upper() << ','
           << pi_stat << ',' << nt_stat.lower() << ',' << nt_stat.upper() << "\n";
    }
    finish(ctx);
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("SMALLCOST_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"Asymptotic no-trade regions and welfare losses under small trading costs"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed_value = 0;
    bool seed_given = false;

    const std::vector<std::pair<std::string, void (*)(RunContext&)>> commands = {
        {"ntregion", cmd_ntregion},   {"simulate", cmd_simulate}, {"welfare", cmd_welfare},
        {"solve", cmd_solve},         {"convergence", cmd_convergence},
    };
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "output directory (default: current)");
        sub->add_option("--seed", seed_value, "override the config seed")
            ->each([&](const std::string&) { seed_given = true; });
        sub->callback([&, fn, name = name]() {
            RunContext ctx;
            ctx.config = load_json_file(config_path);
            if (ctx.config.contains("command") && ctx.config.at("command") != name)
                throw ValidationError("config command \"" +
                                      ctx.config.at("command").get<std::string>() +
                                      "\" does not match subcommand \"" + name + "\"");
            ctx.hash = config_hash(ctx.config);
            ctx.out_dir = out_dir;
            if (seed_given) ctx.seed_override = seed_value;
            fn(ctx);
        });
    }

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
