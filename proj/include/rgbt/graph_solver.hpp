#ifndef RGBT_GRAPH_SOLVER_HPP_
#define RGBT_GRAPH_SOLVER_HPP_

#include <Eigen/Dense>
#include <vector>

namespace rgbt {

/// Parameters of the joint sparse-representation / graph-learning model and
/// its ADMM solver.
struct SolverConfig {
    double lambda = 0.1;  // noise column-sparsity weight
    double gamma = 0.1;   // code column-sparsity weight
    double delta = 11.0;  // code-distance affinity coupling
    double omega = 1.0;   // affinity Tikhonov weight
    double alpha = 10.0;  // node-weight smoothness
    double beta = 0.15;   // node-weight fitting
    double sigma = 37.0;  // logistic slope of the patch-weight map
    int max_outer_iters = 50;
    double tol_residual = 1e-4;
    double rho = 1.0;  // ADMM penalty

    void validate() const;
};

/// Binary foreground seed over the n patches.
struct SeedVector {
    Eigen::VectorXd q;
};

/// Output bundle of solve_joint.
struct GraphState {
    Eigen::MatrixXd Z;               // stacked codes, (M*n) x n
    std::vector<Eigen::MatrixXd> E;  // per-modality noise, d_m x n
    Eigen::MatrixXd A;               // affinity, columns on the simplex
    Eigen::VectorXd s;               // raw patch weights
    Eigen::VectorXd s_hat;           // sigmoid-mapped patch weights, in (0,1)
    Eigen::VectorXd r;               // modality weights, in (0,1]
    Eigen::VectorXd seed;            // the q this state was solved with
    double gamma_reg = 0.0;          // adaptive regularizer, fixed after iteration 1
    std::vector<double> objective_trace;  // one entry per outer iteration
    std::vector<double> residual_trace;   // relative primal residual per iteration
};

/// Auxiliary variable and scaled dual of the code block's ADMM splitting.
struct CodeDuals {
    Eigen::MatrixXd J;  // carries the column-sparsity term
    Eigen::MatrixXd U;  // scaled dual
};

/// Column-wise shrinkage: minimizes tau*||X||_{2,1} + 0.5*||X - M||_F^2.
/// A column with norm <= tau maps to zero.
Eigen::MatrixXd prox_l21(const Eigen::MatrixXd& m, double tau);

/// Euclidean projection onto {u : u >= 0, sum(u) = 1} by sort-and-threshold.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

/// Symmetrized Laplacian D_row + D_col - A - A^T; the exact Hessian of
/// sum_ij A_ij (s_i - s_j)^2 for a possibly asymmetric A.
Eigen::MatrixXd graph_laplacian(const Eigen::MatrixXd& A);

/// Affinity from code distances: column j = project_simplex(-(delta/omega) d_j)
/// with d_ij = ||Z_i - Z_j||^2 over stacked code columns.
Eigen::MatrixXd update_affinity(const Eigen::MatrixXd& Z, double delta, double omega);

/// Patch weights s = beta (alpha L + beta I)^{-1} q.
Eigen::VectorXd update_weights_s(const Eigen::MatrixXd& A, const Eigen::VectorXd& q,
                                 double alpha, double beta);

/// Modality weights r_m = 2 Gamma / (e_m + 2 Gamma) from the per-modality
/// reconstruction errors e_m = ||X^m - X^m Z^m - E^m||_F^2.
Eigen::VectorXd update_modality_weights(const Eigen::VectorXd& errors, double gamma_reg);

/// One ADMM pass of the code block: per-modality linear solve for Z given
/// (J, U), then J <- prox_l21(Z + U, gamma/rho) on the stacked matrix, then
/// dual ascent U += Z - J. Returns the stacked Z.
Eigen::MatrixXd update_codes_Z(const std::vector<Eigen::MatrixXd>& X,
                               const std::vector<Eigen::MatrixXd>& E,
                               const Eigen::VectorXd& r, const Eigen::MatrixXd& A,
                               double gamma, double delta, double rho,
                               CodeDuals& duals);

/// Closed-form noise update: E^m = prox_l21(X^m - X^m Z^m, lambda / r_m^2);
/// r_m = 0 degenerates to E^m equal to the residual.
std::vector<Eigen::MatrixXd> update_noise_E(const std::vector<Eigen::MatrixXd>& X,
                                            const Eigen::MatrixXd& Z,
                                            const Eigen::VectorXd& r, double lambda);

/// Elementwise logistic 1 / (1 + exp(-sigma * s)).
Eigen::VectorXd sigmoid_map(const Eigen::VectorXd& s, double sigma);

/// Evaluates the full model objective at the state's iterates, including the
/// adaptive regularizer term and (omega/2)||A||_F^2.
double objective(const std::vector<Eigen::MatrixXd>& X, const GraphState& state,
                 const SolverConfig& cfg);

/// Block-coordinate ADMM on the joint model. Per outer iteration: code block
/// (linear solves + shrinkage + dual ascent), noise, affinity, patch weights,
/// modality weights. The adaptive regularizer is set from the mean
/// reconstruction error after the first iteration and then held fixed.
/// Terminates when the relative primal residual drops below tol_residual.
GraphState solve_joint(const std::vector<Eigen::MatrixXd>& X, const SeedVector& seed,
                       const SolverConfig& cfg);

}  // namespace rgbt

#endif  // RGBT_GRAPH_SOLVER_HPP_
