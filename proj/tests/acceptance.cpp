// Acceptance gate: one line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "smallcost/config.hpp"
#include "smallcost/corrector.hpp"
#include "smallcost/ergodic.hpp"
#include "smallcost/frictionless.hpp"
#include "smallcost/models.hpp"
#include "smallcost/random.hpp"
#include "smallcost/simulate.hpp"
#include "smallcost/welfare.hpp"

#ifndef SMALLCOST_CONFIG_DIR
#define SMALLCOST_CONFIG_DIR "configs"
#endif

using namespace smallcost;

namespace {

const KimOmbergParams kBench{0.0168, 0.151, 0.271, 0.041, 0.0343, 0.0};
const BlackScholesParams kBenchBS{0.0168, 0.041, 0.151};

struct Criterion {
    std::string failure;  // empty = pass so far

    void expect(bool ok, const std::string& what) {
        if (!ok && failure.empty()) failure = what;
    }
};

int g_failures = 0;

void run(const std::string& name, double budget_seconds,
         const std::function<void(Criterion&)>& body) {
    Criterion c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.failure.empty() && elapsed > budget_seconds) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "took %.2fs > %.2fs budget", elapsed, budget_seconds);
        c.failure = buf;
    }
    if (c.failure.empty()) {
        std::printf("PASS  %-58s (%.2fs)\n", name.c_str(), elapsed);
    } else {
        std::printf("FAIL  %-58s %s\n", name.c_str(), c.failure.c_str());
        ++g_failures;
    }
}

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

}  // namespace

int main() {
    run("band vanishes at zero and full investment", 0.001, [](Criterion& c) {
        c.expect(ntregion_power(0.0, 0.0, 3.0, 0.2, 0.0, 0.01).halfwidth == 0.0,
                 "nonzero half-width at pi = 0");
        c.expect(ntregion_power(1.0, 0.0, 3.0, 0.2, 0.0, 0.01).halfwidth == 0.0,
                 "nonzero half-width at pi = 1");
    });

    run("smooth pasting identities on 1000 random draws", 1.0, [](Criterion& c) {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(0.05, 5.0);
        for (int k = 0; k < 1000; ++k) {
            const double v_z = u(rng), v_zz = -u(rng), sigma = u(rng), a2 = u(rng);
            const CorrectorSolution s = solve_corrector_1d(v_z, v_zz, sigma, a2);
            const double d = s.delta_xi;
            const double second = 12.0 * s.c4 * d * d + 2.0 * s.c2;
            const double first = 4.0 * s.c4 * d * d * d + 2.0 * s.c2 * d;
            const double scale2 = std::max(std::abs(12.0 * s.c4 * d * d), std::abs(2.0 * s.c2));
            c.expect(std::abs(second) <= 1e-12 * scale2,
                     "curvature pasting off by " + fmt(second / scale2));
            c.expect(std::abs(first - v_z) <= 1e-12 * v_z,
                     "gradient pasting off by " + fmt((first - v_z) / v_z));
        }
    });

    run("closed-form value solves the dynamic programming equation", 10.0, [](Criterion& c) {
        const double gamma = 3.0, T = 40.0;
        HjbGrid grid;
        grid.dt = grid.dz = grid.df = 1e-4;
        for (int i = 0; i < 50; ++i) grid.t.push_back(0.5 + 19.5 * i / 49.0);
        grid.z = {1.0};
        for (int i = 0; i < 50; ++i) grid.f.push_back(-0.10 + 0.28 * i / 49.0);
        const auto value = [&](double t, double z, double f) {
            return ko_value(kBench, gamma, T, t, z, f);
        };
        const double resid = hjb_residual(kBench, gamma, value, grid);
        c.expect(resid < 1e-4, "max scaled residual " + fmt(resid));
    });

    run("long-horizon Riccati limits", 1.0, [](Criterion& c) {
        const StationaryPolicy sp = ko_stationary(kBench, 3.0);
        const RiccatiCoefficients rc = ko_riccati(kBench, 3.0, 200.0, 0.0);
        c.expect(std::abs(rc.B - sp.B_bar) < 1e-6, "B gap " + fmt(rc.B - sp.B_bar));
        c.expect(std::abs(rc.C - sp.C_bar) < 1e-6, "C gap " + fmt(rc.C - sp.C_bar));
    });

    run("one-asset solver matches the closed form", 30.0, [](Criterion& c) {
        Eigen::MatrixXd alpha(1, 1), sigma(1, 1);
        alpha << std::sqrt(2.0 / 3.0);
        sigma << 1.0;
        const ProblemData data = make_problem_data(alpha, sigma, 1.0, -1.0, 100.0);
        const GridSpec grid = GridSpec::symmetric({2.5}, 250);  // h = 0.01
        const ErgodicSolution sol = policy_iteration(data, grid);
        c.expect(sol.iterations <= 20, "needed " + std::to_string(sol.iterations) + " iterations");
        c.expect(std::abs(sol.a - (-0.5)) <= 0.01, "a = " + fmt(sol.a));
        const RegionDescription region = extract_no_trade_region(sol, grid);
        const double hw = 0.5 * (region.halfwidth_pos[0] + region.halfwidth_neg[0]);
        c.expect(std::abs(hw - 1.0) <= 0.02, "half-width = " + fmt(hw));
    });

    run("two-asset no-trade half-width", 300.0, [](Criterion& c) {
        const SolveConfig cfg = solve_config_from_json(
            load_json_file(std::string(SMALLCOST_CONFIG_DIR) + "/fig4_top_left.json"));
        const SolveSetup setup = build_solve_setup(cfg);
        const ErgodicSolution sol =
            policy_iteration(setup.data, setup.grid, cfg.solver.tol, cfg.solver.max_iter);
        const RegionDescription region = extract_no_trade_region(sol, setup.grid);
        // The configured cost is the full spread; the half-spread sets the scale.
        const double hw = std::cbrt(0.5 * setup.lambda_p) * 0.5 *
                          (region.halfwidth_pos[1] + region.halfwidth_neg[1]);
        c.expect(std::abs(hw - 0.091) <= 0.005, "asset-2 half-width = " + fmt(hw));
    });

    run("stationary loss ordering across models", 5.0, [](Criterion& c) {
        for (double lambda : {1e-4, 1e-3, 1e-2}) {
            const double ko = esr_loss_ko(kBench, 3.0, lambda).delta_esr;
            const double bs = esr_loss_bs(kBenchBS, 3.0, lambda).delta_esr;
            c.expect(ko > bs, "ordering fails at lambda = " + fmt(lambda));
        }
    });

    run("two-thirds cost scaling is exact", 1.0, [](Criterion& c) {
        const double r1 = std::cbrt(100.0 * 100.0);  // lambda ratio 100 per decade pair
        for (double lambda : {1e-5, 1e-4, 1e-3}) {
            const double k1 = esr_loss_ko(kBench, 3.0, lambda).delta_esr;
            const double k2 = esr_loss_ko(kBench, 3.0, 100.0 * lambda).delta_esr;
            c.expect(std::abs(k2 - r1 * k1) <= 1e-12 * std::abs(k2), "KO scaling breaks");
            const double b1 = esr_loss_bs(kBenchBS, 3.0, lambda).delta_esr;
            const double b2 = esr_loss_bs(kBenchBS, 3.0, 100.0 * lambda).delta_esr;
            c.expect(std::abs(b2 - r1 * b1) <= 1e-12 * std::abs(b2), "BS scaling breaks");
        }
    });

    run("tilted-measure stationary moments", 30.0, [](Criterion& c) {
        const TiltedOUParams tp = tilted_ou(kBench, 3.0, ko_stationary(kBench, 3.0));
        const double sd = kBench.sigma_F / std::sqrt(2.0 * tp.kappa_tilde);
        const double dt = 1.0 / 250.0;
        const double decay = std::exp(-tp.kappa_tilde * dt);
        const double step_sd = sd * std::sqrt(1.0 - decay * decay);

        const long n = 1000000;
        const int n_batches = 100;
        const long batch = n / n_batches;
        std::mt19937_64 rng = rng_for_path(7, 0);
        std::normal_distribution<double> normal(0.0, 1.0);
        double f = tp.F_tilde + sd * normal(rng);

        std::vector<double> bm(n_batches, 0.0), bv(n_batches, 0.0);
        for (int b = 0; b < n_batches; ++b) {
            for (long k = 0; k < batch; ++k) {
                bm[b] += f;
                bv[b] += (f - tp.F_tilde) * (f - tp.F_tilde);
                f = tp.F_tilde + (f - tp.F_tilde) * decay + step_sd * normal(rng);
            }
            bm[b] /= batch;
            bv[b] /= batch;
        }
        const auto moments = [&](const std::vector<double>& xs, double& mean, double& se) {
            mean = 0.0;
            for (double x : xs) mean += x;
            mean /= xs.size();
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            se = std::sqrt(var / (xs.size() - 1.0) / xs.size());
        };
        double mean, mean_se, var, var_se;
        moments(bm, mean, mean_se);
        moments(bv, var, var_se);
        c.expect(std::abs(mean - tp.F_tilde) <= 3.0 * mean_se,
                 "mean " + fmt(mean) + " vs " + fmt(tp.F_tilde) + " (se " + fmt(mean_se) + ")");
        c.expect(std::abs(var - sd * sd) <= 3.0 * var_se,
                 "variance " + fmt(var) + " vs " + fmt(sd * sd) + " (se " + fmt(var_se) + ")");
    });

    run("quadrature matches simulation for the stationary loss", 120.0, [](Criterion& c) {
        MonteCarloConfig mc;
        mc.n_paths = 256;
        mc.seed = 2;
        const MCValue sim = esr_loss_ko_mc(kBench, 3.0, 0.01, mc, 200.0);
        const double quad = esr_loss_ko(kBench, 3.0, 0.01).delta_esr;
        c.expect(std::abs(sim.value - quad) <= 3.0 * sim.standard_error,
                 "gap " + fmt(sim.value - quad) + " vs se " + fmt(sim.standard_error));
    });

    run("simulated weight containment", 10.0, [](Criterion& c) {
        PathConfig cfg;
        cfg.seed = 1;
        cfg.dt = 1.0 / 2520.0;
        cfg.T = 1.0;
        const FrictionalPath path = simulate_proportional(kBench, 3.0, 40.0, 0.01, cfg);
        c.expect(!path.times.empty(), "empty path");
        for (std::size_t i = 0; i < path.times.size(); ++i) {
            c.expect(path.weight[i] >= path.lower[i] - 1e-12 &&
                         path.weight[i] <= path.upper[i] + 1e-12,
                     "weight escapes the band at step " + std::to_string(i));
            if (i > 0)
                c.expect(path.L[i] >= path.L[i - 1] && path.M[i] >= path.M[i - 1],
                         "transfers decrease at step " + std::to_string(i));
        }
    });

    run("generator signs and row sums on shipped solver configs", 10.0, [](Criterion& c) {
        int n_configs = 0;
        for (const auto& entry : std::filesystem::directory_iterator(SMALLCOST_CONFIG_DIR)) {
            if (entry.path().extension() != ".json") continue;
            const nlohmann::json j = load_json_file(entry.path().string());
            if (!j.contains("command") || j.at("command") != "solve") continue;
            ++n_configs;
            const SolveSetup setup = build_solve_setup(solve_config_from_json(j));

            // Exercise both the pure-diffusion and a trading policy.
            Policy trading = zero_policy(setup.grid);
            for (long r = 0; r < setup.grid.total_points(); ++r) {
                const auto idx = setup.grid.unflat(r);
                const double xi0 = setup.grid.coord(0, idx[0]);
                if (xi0 > 0.0) trading.sell(r, 0) = setup.data.K;
                if (xi0 < 0.0) trading.buy(r, 0) = setup.data.K;
            }
            for (const Policy* p : {&trading}) {
                const SparseGenerator gen = discretize_generator(setup.data, *p, setup.grid);
                double scale = 0.0;
                for (int k = 0; k < gen.outerSize(); ++k)
                    for (SparseGenerator::InnerIterator it(gen, k); it; ++it) {
                        if (it.row() != it.col() && it.value() < 0.0)
                            c.expect(false, "negative off-diagonal in " +
                                                entry.path().filename().string());
                        scale = std::max(scale, std::abs(it.value()));
                    }
                for (long r = 0; r < setup.grid.total_points(); ++r) {
                    double s = 0.0;
                    for (SparseGenerator::InnerIterator it(gen, r); it; ++it) s += it.value();
                    c.expect(std::abs(s) <= 1e-14 * scale,
                             "row sum " + fmt(s) + " in " + entry.path().filename().string());
                }
            }
        }
        c.expect(n_configs >= 2, "expected at least two shipped solver configs");

        // Coarse grid with dyadic rates: row sums must be exactly zero.
        Eigen::MatrixXd A(2, 2);
        A << 2.0, 0.5, 0.5, 1.0;
        ProblemData data;
        data.alpha = Eigen::LLT<Eigen::MatrixXd>(A).matrixL();
        data.A = A;
        data.sigma_S = Eigen::MatrixXd::Identity(2, 2);
        data.v_z = 1.0;
        data.v_zz = -1.0;
        data.K = 4.0;
        const GridSpec g = GridSpec::symmetric({1.0, 1.0}, 2);  // h = 0.5
        const SparseGenerator gen = discretize_generator(data, zero_policy(g), g);
        for (long r = 0; r < g.total_points(); ++r) {
            double s = 0.0;
            for (SparseGenerator::InnerIterator it(gen, r); it; ++it) s += it.value();
            c.expect(s == 0.0, "coarse-grid row sum not exactly zero");
        }
    });

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
