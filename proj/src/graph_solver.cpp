#include "rgbt/graph_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rgbt {

void SolverConfig::validate() const {
    if (lambda <= 0 || gamma <= 0 || delta <= 0 || omega <= 0 || alpha <= 0 ||
        beta <= 0 || sigma <= 0 || rho <= 0)
        throw std::invalid_argument("solver parameters must be positive");
    if (max_outer_iters < 1 || tol_residual <= 0)
        throw std::invalid_argument("invalid solver iteration settings");
}

Eigen::MatrixXd prox_l21(const Eigen::MatrixXd& m, double tau) {
    if (tau < 0) throw std::invalid_argument("prox_l21: tau must be >= 0");
    Eigen::MatrixXd out = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double norm = m.col(j).norm();
        out.col(j) *= norm > tau ? (1.0 - tau / norm) : 0.0;
    }
    return out;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumsum += u[k];
        const double cand = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[k] - cand > 0.0) theta = cand;
    }
    return (v.array() - theta).max(0.0);
}

Eigen::MatrixXd graph_laplacian(const Eigen::MatrixXd& A) {
    Eigen::MatrixXd L = -(A + A.transpose());
    const Eigen::VectorXd deg = A.rowwise().sum() + A.colwise().sum().transpose();
    L.diagonal() += deg;
    return L;
}

Eigen::MatrixXd update_affinity(const Eigen::MatrixXd& Z, double delta, double omega) {
    const Eigen::Index n = Z.cols();
    // d_ij = ||Z_i||^2 + ||Z_j||^2 - 2 Z_i.Z_j, clamped against roundoff.
    const Eigen::VectorXd sq = Z.colwise().squaredNorm();
    Eigen::MatrixXd d = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                        2.0 * Z.transpose() * Z;
    d = d.cwiseMax(0.0);
    Eigen::MatrixXd A(n, n);
    const double scale = -delta / omega;
    for (Eigen::Index j = 0; j < n; ++j)
        A.col(j) = project_simplex(scale * d.col(j));
    return A;
}

Eigen::VectorXd update_weights_s(const Eigen::MatrixXd& A, const Eigen::VectorXd& q,
                                 double alpha, double beta) {
    if (!A.allFinite()) throw std::invalid_argument("update_weights_s: non-finite A");
    Eigen::MatrixXd system = alpha * graph_laplacian(A);
    system.diagonal().array() += beta;
    return system.ldlt().solve(beta * q);
}

Eigen::VectorXd update_modality_weights(const Eigen::VectorXd& errors,
                                        double gamma_reg) {
    if (gamma_reg <= 0)
        throw std::invalid_argument("update_modality_weights: Gamma must be > 0");
    return (2.0 * gamma_reg) / (errors.array() + 2.0 * gamma_reg);
}

namespace {

struct ModalityGram {
    Eigen::MatrixXd eigvecs;   // of X^T X
    Eigen::VectorXd eigvals;
    Eigen::MatrixXd gram;      // X^T X
};

std::vector<ModalityGram> precompute_grams(const std::vector<Eigen::MatrixXd>& X) {
    std::vector<ModalityGram> grams;
    grams.reserve(X.size());
    for (const auto& Xm : X) {
        ModalityGram g;
        g.gram = Xm.transpose() * Xm;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.gram);
        g.eigvecs = eig.eigenvectors();
        g.eigvals = eig.eigenvalues().cwiseMax(0.0);
        grams.push_back(std::move(g));
    }
    return grams;
}

// Solves the per-modality Sylvester systems
//   r_m^2 X^T X Z^m + 2 delta Z^m L + rho Z^m = RHS^m
// through the eigenbases of X^T X and L.
Eigen::MatrixXd solve_code_block(const std::vector<Eigen::MatrixXd>& X,
                                 const std::vector<Eigen::MatrixXd>& E,
                                 const Eigen::VectorXd& r,
                                 const std::vector<ModalityGram>& grams,
                                 const Eigen::MatrixXd& L, double delta, double rho,
                                 const Eigen::MatrixXd& J, const Eigen::MatrixXd& U) {
    const Eigen::Index n = X[0].cols();
    const Eigen::Index M = static_cast<Eigen::Index>(X.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_l(L);
    const Eigen::MatrixXd& V = eig_l.eigenvectors();
    const Eigen::VectorXd lam = eig_l.eigenvalues().cwiseMax(0.0);

    Eigen::MatrixXd Z(M * n, n);
    for (Eigen::Index m = 0; m < M; ++m) {
        const double r2 = r(m) * r(m);
        const Eigen::MatrixXd rhs = r2 * (grams[m].gram - X[m].transpose() * E[m]) +
                                    rho * (J.middleRows(m * n, n) -
                                           U.middleRows(m * n, n));
        Eigen::MatrixXd T = grams[m].eigvecs.transpose() * rhs * V;
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index l = 0; l < n; ++l)
                T(k, l) /= r2 * grams[m].eigvals(k) + 2.0 * delta * lam(l) + rho;
        Z.middleRows(m * n, n) = grams[m].eigvecs * T * V.transpose();
    }
    return Z;
}

Eigen::VectorXd reconstruction_errors(const std::vector<Eigen::MatrixXd>& X,
                                      const Eigen::MatrixXd& Z,
                                      const std::vector<Eigen::MatrixXd>& E) {
    const Eigen::Index n = X[0].cols();
    Eigen::VectorXd e(X.size());
    for (std::size_t m = 0; m < X.size(); ++m)
        e(m) = (X[m] - X[m] * Z.middleRows(m * n, n) - E[m]).squaredNorm();
    return e;
}

double l21_norm(const Eigen::MatrixXd& m) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) sum += m.col(j).norm();
    return sum;
}

}  // namespace

Eigen::MatrixXd update_codes_Z(const std::vector<Eigen::MatrixXd>& X,
                               const std::vector<Eigen::MatrixXd>& E,
                               const Eigen::VectorXd& r, const Eigen::MatrixXd& A,
                               double gamma, double delta, double rho,
                               CodeDuals& duals) {
    const auto grams = precompute_grams(X);
    const Eigen::MatrixXd L = graph_laplacian(A);
    const Eigen::MatrixXd Z =
        solve_code_block(X, E, r, grams, L, delta, rho, duals.J, duals.U);
    duals.J = prox_l21(Z + duals.U, gamma / rho);
    duals.U += Z - duals.J;
    return Z;
}

std::vector<Eigen::MatrixXd> update_noise_E(const std::vector<Eigen::MatrixXd>& X,
                                            const Eigen::MatrixXd& Z,
                                            const Eigen::VectorXd& r, double lambda) {
    const Eigen::Index n = X[0].cols();
    std::vector<Eigen::MatrixXd> E;
    E.reserve(X.size());
    for (std::size_t m = 0; m < X.size(); ++m) {
        const Eigen::MatrixXd residual = X[m] - X[m] * Z.middleRows(m * n, n);
        const double r2 = r(static_cast<Eigen::Index>(m)) *
                          r(static_cast<Eigen::Index>(m));
        E.push_back(r2 > 0.0 ? prox_l21(residual, lambda / r2) : residual);
    }
    return E;
}

Eigen::VectorXd sigmoid_map(const Eigen::VectorXd& s, double sigma) {
    return (1.0 / (1.0 + (-sigma * s.array()).exp())).matrix();
}

double objective(const std::vector<Eigen::MatrixXd>& X, const GraphState& state,
                 const SolverConfig& cfg) {
    const Eigen::Index n = X[0].cols();
    double value = 0.0;
    for (std::size_t m = 0; m < X.size(); ++m) {
        const Eigen::Index mi = static_cast<Eigen::Index>(m);
        const double r2 = state.r(mi) * state.r(mi);
        value += 0.5 * r2 *
                 (X[m] - X[m] * state.Z.middleRows(mi * n, n) - state.E[m]).squaredNorm();
        value += cfg.lambda * l21_norm(state.E[m]);
    }
    value += cfg.gamma * l21_norm(state.Z);

    // Pairwise code-distance and node-weight smoothness terms.
    const Eigen::VectorXd sq = state.Z.colwise().squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dz = std::max(
                0.0, sq(i) + sq(j) - 2.0 * state.Z.col(i).dot(state.Z.col(j)));
            const double ds = state.s(i) - state.s(j);
            value += (cfg.delta * dz + cfg.alpha * ds * ds) * state.A(i, j);
        }
    }
    value += cfg.beta * (state.s - state.seed).squaredNorm();
    value += state.gamma_reg * (1.0 - state.r.array()).square().sum();
    value += 0.5 * cfg.omega * state.A.squaredNorm();
    return value;
}

GraphState solve_joint(const std::vector<Eigen::MatrixXd>& X, const SeedVector& seed,
                       const SolverConfig& cfg) {
    cfg.validate();
    if (X.empty()) throw std::invalid_argument("solve_joint: no modalities");
    const Eigen::Index n = X[0].cols();
    const Eigen::Index M = static_cast<Eigen::Index>(X.size());
    for (const auto& Xm : X) {
        if (Xm.cols() != n)
            throw std::invalid_argument("solve_joint: modalities disagree in n");
        if (!Xm.allFinite())
            throw std::invalid_argument("solve_joint: non-finite features");
    }
    if (seed.q.size() != n)
        throw std::invalid_argument("solve_joint: seed length != n");

    GraphState st;
    st.seed = seed.q;
    st.Z = Eigen::MatrixXd::Zero(M * n, n);
    for (const auto& Xm : X) st.E.push_back(Eigen::MatrixXd::Zero(Xm.rows(), n));
    st.A = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
    st.s = seed.q;
    st.r = Eigen::VectorXd::Ones(M);

    CodeDuals duals{Eigen::MatrixXd::Zero(M * n, n), Eigen::MatrixXd::Zero(M * n, n)};
    const auto grams = precompute_grams(X);

    for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
        const Eigen::MatrixXd L = graph_laplacian(st.A);
        st.Z = solve_code_block(X, st.E, st.r, grams, L, cfg.delta, cfg.rho,
                                duals.J, duals.U);
        duals.J = prox_l21(st.Z + duals.U, cfg.gamma / cfg.rho);

        st.E = update_noise_E(X, st.Z, st.r, cfg.lambda);
        st.A = update_affinity(st.Z, cfg.delta, cfg.omega);
        st.s = update_weights_s(st.A, seed.q, cfg.alpha, cfg.beta);

        const Eigen::VectorXd errors = reconstruction_errors(X, st.Z, st.E);
        if (iter == 0) {
            // Calibrated on the raw self-representation residual: measuring
            // the post-shrinkage error here would pin Gamma near n*lambda^2
            // and let the E/r feedback collapse the modality weights.
            Eigen::VectorXd raw(M);
            for (Eigen::Index m = 0; m < M; ++m)
                raw(m) = (X[m] - X[m] * st.Z.middleRows(m * n, n)).squaredNorm();
            st.gamma_reg = std::max(raw.mean() / 2.0, 1e-12);
        } else {
            st.r = update_modality_weights(errors, st.gamma_reg);
        }

        duals.U += st.Z - duals.J;

        const double residual =
            (st.Z - duals.J).norm() / std::max(1.0, st.Z.norm());
        st.residual_trace.push_back(residual);
        st.objective_trace.push_back(objective(X, st, cfg));
        if (residual < cfg.tol_residual) break;
    }

    st.s_hat = sigmoid_map(st.s, cfg.sigma);
    return st;
}

}  // namespace rgbt
