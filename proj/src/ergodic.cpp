#include "smallcost/ergodic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseLU>

namespace smallcost {

GridSpec GridSpec::symmetric(const std::vector<double>& halfwidths, int points_per_side) {
    GridSpec g;
    g.d = static_cast<int>(halfwidths.size());
    for (double hw : halfwidths) {
        if (hw <= 0.0) throw ValidationError("grid halfwidth must be positive");
        g.h.push_back(hw / points_per_side);
        g.n_neg.push_back(points_per_side);
        g.n_pos.push_back(points_per_side);
    }
    return g;
}

long GridSpec::total_points() const {
    long n = 1;
    for (int i = 0; i < d; ++i) n *= points(i);
    return n;
}

long GridSpec::flat(const std::vector<int>& idx) const {
    long r = 0;
    for (int i = 0; i < d; ++i) r = r * points(i) + idx[i];
    return r;
}

std::vector<int> GridSpec::unflat(long flat_index) const {
    std::vector<int> idx(d);
    for (int i = d - 1; i >= 0; --i) {
        idx[i] = static_cast<int>(flat_index % points(i));
        flat_index /= points(i);
    }
    return idx;
}

long GridSpec::origin_index() const {
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = n_neg[i];
    return flat(idx);
}

const GridSpec& validate(const GridSpec& g) {
    if (g.d < 1) throw ValidationError("grid dimension must be at least 1");
    if (static_cast<int>(g.h.size()) != g.d || static_cast<int>(g.n_neg.size()) != g.d ||
        static_cast<int>(g.n_pos.size()) != g.d)
        throw ValidationError("grid arrays must have length d");
    for (int i = 0; i < g.d; ++i) {
        if (g.h[i] <= 0.0) throw ValidationError("h must be positive");
        if (g.n_neg[i] < 1 || g.n_pos[i] < 1)
            throw ValidationError("grid must extend on both sides of the origin");
    }
    return g;
}

Eigen::MatrixXd build_alpha_matrix(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_z,
                                   const Eigen::MatrixXd& sigma_S) {
    const auto d = theta.size();
    if (theta_z.size() != d || sigma_S.rows() != d || sigma_S.cols() != d)
        throw ValidationError("dimension mismatch in build_alpha_matrix");
    const Eigen::MatrixXd M =
        Eigen::MatrixXd::Identity(d, d) - theta_z * Eigen::RowVectorXd::Ones(d);
    return M * theta.asDiagonal() * sigma_S;
}

ProblemData make_problem_data(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& sigma_S,
                              double v_z, double v_zz, double K) {
    if (alpha.rows() != alpha.cols()) throw ValidationError("alpha must be square");
    if (sigma_S.rows() != alpha.rows() || sigma_S.cols() != alpha.cols())
        throw ValidationError("sigma_S must match alpha in shape");
    if (v_z <= 0.0) throw ValidationError("v_z must be positive");
    if (v_zz >= 0.0) throw ValidationError("v_zz must be negative");
    if (K <= 0.0) throw ValidationError("K must be positive");
    ProblemData data;
    data.alpha = alpha;
    data.A = alpha * alpha.transpose();
    data.sigma_S = sigma_S;
    data.v_z = v_z;
    data.v_zz = v_zz;
    data.K = K;
    return data;
}

void check_monotone_stencil(const ProblemData& data, const GridSpec& grid) {
    validate(grid);
    for (int i = 0; i < grid.d; ++i) {
        double off = 0.0;
        for (int j = 0; j < grid.d; ++j)
            if (j != i) off += std::abs(data.A(i, j)) / (grid.h[i] * grid.h[j]);
        if (data.A(i, i) / (grid.h[i] * grid.h[i]) - off < -1e-14)
            throw std::domain_error(
                "non-monotone stencil: rebalance the per-dimension grid steps h_i");
    }
}

Policy zero_policy(const GridSpec& grid) {
    Policy p;
    p.buy = Eigen::MatrixXd::Zero(grid.total_points(), grid.d);
    p.sell = Eigen::MatrixXd::Zero(grid.total_points(), grid.d);
    return p;
}

namespace {

// Running cost at a grid point under the given rates.
double running_cost(const ProblemData& data, const GridSpec& grid, const std::vector<int>& idx,
                    const Eigen::VectorXd& rates_sum) {
    Eigen::VectorXd xi(grid.d);
    for (int i = 0; i < grid.d; ++i) xi(i) = grid.coord(i, idx[i]);
    const double quad = (data.sigma_S.transpose() * xi).squaredNorm();
    return -0.5 * quad * data.v_zz + data.v_z * rates_sum.sum();
}

}  // namespace

SparseGenerator discretize_generator(const ProblemData& data, const Policy& policy,
                                     const GridSpec& grid) {
    check_monotone_stencil(data, grid);
    const long N = grid.total_points();
    const int d = grid.d;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * (2 * d + d * (d - 1) * 2 + 1));

    // Diffusion coefficients are position-independent; precompute per dimension.
    std::vector<double> diff_coeff(d);
    for (int i = 0; i < d; ++i) {
        double off = 0.0;
        for (int j = 0; j < d; ++j)
            if (j != i) off += std::abs(data.A(i, j)) / (grid.h[i] * grid.h[j]);
        diff_coeff[i] = std::max(0.0, 0.5 * (data.A(i, i) / (grid.h[i] * grid.h[i]) - off));
    }

    std::vector<int> idx(d), nbr(d);
    for (long r = 0; r < N; ++r) {
        idx = grid.unflat(r);
        double out_rate = 0.0;

        auto add = [&](long col, double rate) {
            if (rate <= 0.0) return;
            trip.emplace_back(static_cast<int>(r), static_cast<int>(col), rate);
            out_rate += rate;
        };

        for (int i = 0; i < d; ++i) {
            const double nu = policy.buy(r, i) - policy.sell(r, i);
            const bool has_up = idx[i] < grid.points(i) - 1;
            const bool has_down = idx[i] > 0;
            nbr = idx;
            if (has_up) {
                nbr[i] = idx[i] + 1;
                add(grid.flat(nbr), diff_coeff[i] + std::max(0.0, nu) / grid.h[i]);
            }
            if (has_down) {
                nbr[i] = idx[i] - 1;
                add(grid.flat(nbr), diff_coeff[i] + std::max(0.0, -nu) / grid.h[i]);
            }
            nbr[i] = idx[i];
        }

        // Cross-derivative corners, once per unordered pair.
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                const double Aij = data.A(i, j);
                if (Aij == 0.0) continue;
                const double rate = std::abs(Aij) / (2.0 * grid.h[i] * grid.h[j]);
                const int sj = Aij > 0.0 ? 1 : -1;  // same-sign corners for positive A_ij
                for (int si : {1, -1}) {
                    const int dir_j = si * sj;
                    const int ni = idx[i] + si, nj = idx[j] + dir_j;
                    if (ni < 0 || ni >= grid.points(i) || nj < 0 || nj >= grid.points(j))
                        continue;  // folded into the diagonal at the boundary
                    nbr = idx;
                    nbr[i] = ni;
                    nbr[j] = nj;
                    add(grid.flat(nbr), rate);
                }
            }
        }

        trip.emplace_back(static_cast<int>(r), static_cast<int>(r), -out_rate);
    }

    SparseGenerator gen(N, N);
    gen.setFromTriplets(trip.begin(), trip.end());
    return gen;
}

std::pair<Eigen::VectorXd, double> policy_evaluation(const SparseGenerator& gen,
                                                     const Policy& policy,
                                                     const ProblemData& data,
                                                     const GridSpec& grid) {
    const long N = grid.total_points();
    const long origin = grid.origin_index();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(gen.nonZeros() + N + 1);
    for (int k = 0; k < gen.outerSize(); ++k)
        for (SparseGenerator::InnerIterator it(gen, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                              it.value());
    for (long r = 0; r < N; ++r)
        trip.emplace_back(static_cast<int>(r), static_cast<int>(N), 1.0);  // the unknown a
    trip.emplace_back(static_cast<int>(N), static_cast<int>(origin), 1.0);  // w(0) = 0

    Eigen::SparseMatrix<double> sys(N + 1, N + 1);
    sys.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd rhs(N + 1);
    std::vector<int> idx;
    for (long r = 0; r < N; ++r) {
        idx = grid.unflat(r);
        const Eigen::VectorXd rates = (policy.buy.row(r) + policy.sell.row(r)).transpose();
        rhs(r) = -running_cost(data, grid, idx, rates);
    }
    rhs(N) = 0.0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(sys);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("singular linear system in policy evaluation");
    const Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("linear solve failed in policy evaluation");
    return {x.head(N), x(N)};
}

Policy policy_improvement(const Eigen::VectorXd& w, const ProblemData& data,
                          const GridSpec& grid) {
    const long N = grid.total_points();
    Policy p = zero_policy(grid);

    std::vector<int> idx(grid.d), nbr(grid.d);
    for (long r = 0; r < N; ++r) {
        idx = grid.unflat(r);
        for (int i = 0; i < grid.d; ++i) {
            double g_buy = 0.0, g_sell = 0.0;  // marginal objective per unit rate
            if (idx[i] < grid.points(i) - 1) {
                nbr = idx;
                nbr[i] = idx[i] + 1;
                g_buy = data.v_z + (w(grid.flat(nbr)) - w(r)) / grid.h[i];
            }
            if (idx[i] > 0) {
                nbr = idx;
                nbr[i] = idx[i] - 1;
                g_sell = data.v_z + (w(grid.flat(nbr)) - w(r)) / grid.h[i];
            }
            // Bang-bang: full rate only when strictly beneficial; ties to zero,
            // and never buy and sell the same asset at once.
            if (g_buy < 0.0 && g_buy < g_sell)
                p.buy(r, i) = data.K;
            else if (g_sell < 0.0 && g_sell < g_buy)
                p.sell(r, i) = data.K;
        }
    }
    return p;
}

ErgodicSolution policy_iteration(const ProblemData& data, const GridSpec& grid, double tol,
                                 int max_iter) {
    check_monotone_stencil(data, grid);
    ErgodicSolution sol;
    Policy policy = zero_policy(grid);

    double threshold = tol;  // rescaled to tol * |a_1| after the first evaluation
    for (int j = 1; j <= max_iter; ++j) {
        const SparseGenerator gen = discretize_generator(data, policy, grid);
        auto [w, a] = policy_evaluation(gen, policy, data, grid);
        sol.a_history.push_back(a);
        sol.iterations = j;
        if (j == 1) threshold = tol * std::max(std::abs(a), 1e-300);

        if (j > 1 && std::abs(a - sol.a_history[j - 2]) < threshold) {
            sol.w = std::move(w);
            sol.a = a;
            sol.policy = std::move(policy);
            return sol;
        }
        policy = policy_improvement(w, data, grid);
        sol.w = std::move(w);
        sol.a = a;
    }

    std::ostringstream msg;
    msg << "no convergence after " << max_iter << " iterations; a-sequence:";
    for (double a : sol.a_history) msg << ' ' << a;
    throw std::runtime_error(msg.str());
}

RegionDescription extract_no_trade_region(const ErgodicSolution& sol, const GridSpec& grid) {
    const long N = grid.total_points();
    RegionDescription region;
    region.mask.resize(N);

    for (long r = 0; r < N; ++r) {
        int active_dim = -1;
        int active_count = 0;
        int sign = 0;
        for (int i = 0; i < grid.d; ++i) {
            if (sol.policy.buy(r, i) > 0.0 || sol.policy.sell(r, i) > 0.0) {
                ++active_count;
                active_dim = i;
                sign = sol.policy.buy(r, i) > 0.0 ? 1 : -1;
            }
        }
        region.mask[r] = active_count == 0 ? 0
                         : active_count == 1 ? sign * (active_dim + 1)
                                             : 3;
    }

    if (region.mask[grid.origin_index()] != 0) throw std::domain_error("empty region");

    region.halfwidth_pos.resize(grid.d);
    region.halfwidth_neg.resize(grid.d);
    std::vector<int> idx(grid.d);
    for (int i = 0; i < grid.d; ++i) {
        for (int k = 0; k < grid.d; ++k) idx[k] = grid.n_neg[k];
        int last_zero = 0;
        for (int step = 1; step <= grid.n_pos[i]; ++step) {
            idx[i] = grid.n_neg[i] + step;
            if (region.mask[grid.flat(idx)] != 0) break;
            last_zero = step;
        }
        region.halfwidth_pos[i] = (last_zero + 0.5) * grid.h[i];
        last_zero = 0;
        for (int step = 1; step <= grid.n_neg[i]; ++step) {
            idx[i] = grid.n_neg[i] - step;
            if (region.mask[grid.flat(idx)] != 0) break;
            last_zero = step;
        }
        region.halfwidth_neg[i] = (last_zero + 0.5) * grid.h[i];
        idx[i] = grid.n_neg[i];
    }
    return region;
}

}  // namespace smallcost
