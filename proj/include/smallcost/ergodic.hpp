#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "smallcost/models.hpp"

namespace smallcost {

/// Uniform tensor grid in deviation units; the origin is a grid point by
/// construction (lo_i = -n_neg_i h_i, hi_i = n_pos_i h_i).
struct GridSpec {
    int d = 1;
    std::vector<double> h;   // step per dimension
    std::vector<int> n_neg;  // points below 0 per dimension
    std::vector<int> n_pos;  // points above 0 per dimension

    static GridSpec symmetric(const std::vector<double>& halfwidths, int points_per_side);

    int points(int dim) const { return n_neg[dim] + n_pos[dim] + 1; }
    long total_points() const;
    long origin_index() const;
    double coord(int dim, int idx) const { return (idx - n_neg[dim]) * h[dim]; }

    // Flat row-major indexing over per-dimension indices.
    long flat(const std::vector<int>& idx) const;
    std::vector<int> unflat(long flat_index) const;
};

const GridSpec& validate(const GridSpec& g);

/// Frozen data of the d-dimensional ergodic deviation-control problem.
struct ProblemData {
    Eigen::MatrixXd alpha;    // d x d diffusion matrix of the deviation
    Eigen::MatrixXd A;        // alpha alpha^T
    Eigen::MatrixXd sigma_S;  // d x d asset volatility matrix (rows = assets)
    double v_z = 1.0;
    double v_zz = -1.0;
    double K = 100.0;  // trading-rate cap
};

ProblemData make_problem_data(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& sigma_S,
                              double v_z, double v_zz, double K);

/// alpha = (I_d - theta_z 1_d^T) diag[theta] sigma_S.
Eigen::MatrixXd build_alpha_matrix(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_z,
                                   const Eigen::MatrixXd& sigma_S);

/// Throws "non-monotone stencil" unless A_ii/h_i^2 - sum_{j != i} |A_ij|/(h_i h_j) >= 0
/// for every i (nonnegativity of the diffusion off-diagonals).
void check_monotone_stencil(const ProblemData& data, const GridSpec& grid);

/// Bang-bang trading rates per grid point and dimension; each entry is 0 or K,
/// never both buy and sell in the same dimension.
struct Policy {
    Eigen::MatrixXd buy;   // total_points x d
    Eigen::MatrixXd sell;  // total_points x d
};

using SparseGenerator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Transition-rate matrix of the controlled grid process: off-diagonals >= 0,
/// rows sum to zero exactly (outgoing boundary rates folded into the diagonal).
SparseGenerator discretize_generator(const ProblemData& data, const Policy& policy,
                                     const GridSpec& grid);

/// Solves L w + f = -a with w(0) = 0 via a bordered sparse direct solve.
std::pair<Eigen::VectorXd, double> policy_evaluation(const SparseGenerator& gen,
                                                     const Policy& policy,
                                                     const ProblemData& data,
                                                     const GridSpec& grid);

/// Pointwise bang-bang improvement; ties broken to zero (no trading).
Policy policy_improvement(const Eigen::VectorXd& w, const ProblemData& data,
                          const GridSpec& grid);

Policy zero_policy(const GridSpec& grid);

struct ErgodicSolution {
    Eigen::VectorXd w;
    double a = 0.0;
    Policy policy;
    int iterations = 0;
    std::vector<double> a_history;
};

/// Policy iteration from the zero policy until |a_j - a_{j-1}| < tol.
/// Throws "no convergence" (with the a-sequence in the message) after max_iter.
ErgodicSolution policy_iteration(const ProblemData& data, const GridSpec& grid,
                                 double tol = 1e-9, int max_iter = 200);

/// Per-dimension half-widths of the zero-policy set along the axis through the
/// origin, plus a dense policy-code mask (0 none, +-1 asset-1 buy/sell,
/// +-2 asset-2 buy/sell, 3 corner) for d = 2 plotting.
struct RegionDescription {
    std::vector<double> halfwidth_pos;  // toward +xi_i, boundary at midpoint
    std::vector<double> halfwidth_neg;  // toward -xi_i
    std::vector<int> mask;              // per grid point policy code
};

RegionDescription extract_no_trade_region(const ErgodicSolution& sol, const GridSpec& grid);

}  // namespace smallcost
