#include "consensus/lyapunov.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace consensus {

namespace {

Eigen::MatrixXd to_eigen(const Matrix<double>& a) {
    Eigen::MatrixXd m(a.n, a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) m(i, j) = a(i, j);
    return m;
}

}  // namespace

SpectralReport spectral_gap(const Matrix<double>& a, double tol) {
    int n = a.n;
    if (n < 3) throw std::invalid_argument("spectral_gap: n >= 3 required");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (std::abs(i - j) > 1 && std::abs(a(i, j)) > tol)
                throw std::invalid_argument("spectral_gap: support not tridiagonal");
            if (a(i, j) < -tol) throw std::invalid_argument("spectral_gap: negative entry");
        }
    for (int i = 0; i < n; ++i) {
        double rs = 0, cs = 0;
        for (int j = 0; j < n; ++j) {
            rs += a(i, j);
            cs += a(j, i);
        }
        if (std::abs(rs - 1) > tol || std::abs(cs - 1) > tol)
            throw std::invalid_argument("spectral_gap: not doubly stochastic");
    }
    for (int i = 0; i + 1 < n; ++i)
        if (a(i, i + 1) <= tol)
            throw std::invalid_argument("spectral_gap: support graph not connected");
    // Doubly stochastic + tridiagonal forces symmetry; solve the symmetrized
    // problem.
    Eigen::MatrixXd m = to_eigen(a);
    Eigen::MatrixXd sym = (m + m.transpose()) / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    SpectralReport rep;
    rep.n = n;
    for (int i = 0; i < n; ++i) rep.eigenvalues.push_back(es.eigenvalues()(i));
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), std::greater<>());
    rep.lambda2 = rep.eigenvalues[1];
    rep.bound = 1.0 - 6.0 / (double(n) * n);
    rep.in_interval = rep.lambda2 > rep.bound && rep.lambda2 < 1.0;
    return rep;
}

FixedMatrixLyapunov fixed_matrix_lyapunov(const Matrix<double>& a,
                                          const std::vector<double>& pi, double tol) {
    int n = a.n;
    if (int(pi.size()) != n) throw std::invalid_argument("pi: size mismatch");
    double pi_sum = 0;
    for (double p : pi) {
        if (p <= 0) throw std::invalid_argument("pi must be positive");
        pi_sum += p;
    }
    if (std::abs(pi_sum - 1) > tol) throw std::invalid_argument("pi must sum to 1");
    Eigen::MatrixXd A = to_eigen(a);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = pi[i];
    FixedMatrixLyapunov out;
    out.pi_residual = (A.transpose() * p - p).cwiseAbs().maxCoeff();
    if (out.pi_residual > tol)
        throw std::invalid_argument("pi is not a left eigenvector of A");
    Eigen::MatrixXd H =
        Eigen::MatrixXd::Identity(n, n) - Eigen::VectorXd::Ones(n) * p.transpose();
    Eigen::MatrixXd M = H.transpose() * p.asDiagonal() * H;
    out.m = Matrix<double>(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.m(i, j) = M(i, j);
    out.m_one_norm = (M * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
    out.min_eig_m = em.eigenvalues().minCoeff();
    out.rank = int((em.eigenvalues().array() > 1e-10).count());
    Eigen::MatrixXd drop = M - A.transpose() * M * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed((drop + drop.transpose()) / 2);
    out.min_eig_drop = ed.eigenvalues().minCoeff();
    out.valid = out.m_one_norm <= 1e-10 && out.min_eig_m >= -1e-10 &&
                out.min_eig_drop >= -1e-10 && out.rank == n - 1;
    return out;
}

AppendixACounterexample appendix_a_counterexample() {
    AppendixACounterexample out;
    out.graph = build_snapshot(
        8, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {4, 7}, {5, 7}, {6, 7}});
    out.x = {Rat(5), Rat(2), Rat(2), Rat(2), Rat(0), Rat(-3), Rat(-3), Rat(-5)};
    auto w = build_weights<Rat>(WeightScheme::equal_neighbor(), out.graph);
    out.y = w.a.apply(out.x);
    out.v_x = variance_mean(out.x);
    out.v_y = variance_mean(out.y);
    out.eight_term_sum = out.v_y;  // n = 8: the full sum is the 8-term sum
    return out;
}

std::optional<long> convergence_time(const std::vector<MetricRow>& rows, double eps,
                                     Measure measure) {
    auto get = [&](const MetricRow& r) {
        switch (measure) {
            case Measure::V: return r.V;
            case Measure::underlineV: return r.underlineV;
            case Measure::spread: return r.spread;
        }
        return r.V;
    };
    if (rows.empty()) return std::nullopt;
    double target = eps * get(rows[0]);
    if (get(rows[0]) == 0) return 0;
    std::optional<long> first;
    for (const auto& r : rows) {
        if (get(r) <= target) {
            if (!first) first = r.step;
        } else {
            first.reset();
        }
    }
    return first;
}

}  // namespace consensus
