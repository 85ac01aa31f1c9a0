#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nodal_lab/fem.hpp"

namespace nodal_lab {

using Matrix = Eigen::MatrixXd;

/// Relative gap below which neighbouring eigenvalues are grouped into one cluster.
inline constexpr double kClusterTol = 1e-6;

/// Lowest eigenpairs of K u = lambda M u. Eigenvectors are per-vertex (zero on Dirichlet
/// vertices), M-orthonormal and sign-anchored.
struct Spectrum {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;  // vertex_count x (m+1)
    std::vector<double> residuals;
    std::vector<int> cluster_id;
    bool converged = true;
    int iterations = 0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    Vector vector(int k) const { return eigenvectors.col(k); }

    /// Indices belonging to the cluster of pair k.
    std::vector<int> cluster_of(int k) const {
        std::vector<int> out;
        for (int i = 0; i < size(); ++i)
            if (cluster_id[i] == cluster_id[k]) out.push_back(i);
        return out;
    }
};

namespace detail {

inline std::vector<int> clusters(const std::vector<double>& lambda, double tol) {
    std::vector<int> id(lambda.size(), 0);
    const double top = lambda.empty() ? 0.0 : std::abs(lambda.back());
    for (std::size_t i = 1; i < lambda.size(); ++i) {
        const double a = lambda[i - 1], b = lambda[i];
        const double scale = std::max({std::abs(a), std::abs(b), 1e-10 * top});
        id[i] = (std::abs(b - a) <= tol * scale) ? id[i - 1] : id[i - 1] + 1;
    }
    return id;
}

/// Lowest-index vertex with |u| > 0.1 max|u|.
inline int sign_anchor(const Vector& u) {
    const double mx = u.cwiseAbs().maxCoeff();
    for (int i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > 0.1 * mx) return i;
    return 0;
}

/// Columns of x made M-orthonormal (drops numerically dependent directions).
inline Matrix m_orthonormalize(const Matrix& x, const SparseMatrix& mass) {
    const Matrix g = x.transpose() * (mass * x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()));
    const double top = es.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < g.rows(); ++i)
        if (es.eigenvalues()[i] > 1e-13 * top) keep.push_back(i);
    Matrix q(x.rows(), static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        q.col(j) = x * es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()[keep[j]]);
    return q;
}

/// Sorts Ritz pairs, fixes signs, computes residuals and clusters.
inline Spectrum finish(const DiscreteOperator& op, const Vector& theta, const Matrix& x, int count) {
    Spectrum s;
    s.eigenvectors.resize(op.vertex_count(), count);
    for (int k = 0; k < count; ++k) {
        Vector f = x.col(k);
        const Vector mf = op.mass * f;
        const double res = (op.stiffness * f - theta[k] * mf).norm() / mf.norm();
        Vector u = op.expand(f);
        if (u[sign_anchor(u)] < 0) u = -u;
        s.eigenvalues.push_back(theta[k]);
        s.residuals.push_back(res);
        s.eigenvectors.col(k) = u;
    }
    s.cluster_id = clusters(s.eigenvalues, kClusterTol);
    return s;
}

}  // namespace detail

/// Lowest m+1 eigenpairs by shift-inverted block subspace iteration with Rayleigh-Ritz.
///
/// Closed problems are shifted by a small negative multiple of tr(K)/tr(M) so the factored
/// operator is definite; a failed factorization is retried with a larger shift.
/// Convergence: residual_k <= tol * (|lambda_k| + |shift|) for every k <= m.
inline Spectrum solve_lowest(const DiscreteOperator& op, int m, double tol = 1e-9, unsigned seed = 42,
                             int max_iterations = 2000) {
    const int n = op.free_count();
    require(m >= 0 && m + 1 <= n, "solve_lowest: need m+1 <= free vertex count");
    require(tol > 0, "solve_lowest: tol must be positive");
    const int want = m + 1;
    const int block = std::min(n, std::max(2 * want, want + 8));

    double shift = 0.0;
    if (op.bc == BoundaryCondition::closed) {
        double tk = 0, tm = 0;
        for (int i = 0; i < n; ++i) tk += op.stiffness.coeff(i, i), tm += op.mass.coeff(i, i);
        shift = -1e-3 * tk / tm;
    }
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    for (int attempt = 0;; ++attempt) {
        const SparseMatrix a = op.stiffness - shift * op.mass;
        ldlt.compute(a);
        bool ok = ldlt.info() == Eigen::Success;
        if (ok) {
            const Vector d = ldlt.vectorD();
            ok = d.minCoeff() > 1e-14 * d.cwiseAbs().maxCoeff();
        }
        if (ok) break;
        if (attempt == 5) fail(ErrorKind::numerical, "solve_lowest: operator could not be factored");
        shift = shift == 0.0 ? -1e-8 : 10.0 * shift;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix x(n, block);
    for (int j = 0; j < block; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = dist(rng);

    Vector theta;
    for (int it = 1;; ++it) {
        const Matrix y = ldlt.solve(op.mass * x);
        const Matrix q = detail::m_orthonormalize(y, op.mass);
        const Matrix kq = q.transpose() * (op.stiffness * q);
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (kq + kq.transpose()));
        theta = es.eigenvalues();
        x = q * es.eigenvectors();
        if (x.cols() < want) fail(ErrorKind::numerical, "solve_lowest: subspace collapsed");

        bool done = true;
        for (int k = 0; k < want && done; ++k) {
            const Vector f = x.col(k);
            const Vector mf = op.mass * f;
            const double r = (op.stiffness * f - theta[k] * mf).norm() / mf.norm();
            done = r <= tol * (std::abs(theta[k]) + std::abs(shift));
        }
        if (done || it == max_iterations) {
            // non-convergence is reported through the flag; residuals hold the best available values
            Spectrum s = detail::finish(op, theta, x, want);
            s.iterations = it;
            s.converged = done;
            return s;
        }
        if (x.cols() < block) {  // refill dropped directions
            Matrix grown(n, block);
            grown.leftCols(x.cols()) = x;
            for (int j = static_cast<int>(x.cols()); j < block; ++j)
                for (int i = 0; i < n; ++i) grown(i, j) = dist(rng);
            x = grown;
        }
    }
}

/// Dense generalized symmetric eigendecomposition; verification oracle for small problems.
inline Spectrum dense_oracle(const DiscreteOperator& op, int m, int size_cap = 3000) {
    const int n = op.free_count();
    if (n > size_cap) fail(ErrorKind::invalid_input, "dense_oracle: problem exceeds the size cap");
    require(m >= 0 && m + 1 <= n, "dense_oracle: need m+1 <= free vertex count");
    const Matrix k = Matrix(op.stiffness);
    const Matrix mm = Matrix(op.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(k, mm, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) fail(ErrorKind::numerical, "dense_oracle: decomposition failed");
    return detail::finish(op, es.eigenvalues(), es.eigenvectors(), m + 1);
}

/// Principal angles between two M-orthonormal blocks, and B rotated to best match A.
struct SubspaceDistance {
    std::vector<double> angles;  // ascending, radians
    double max_angle = 0.0;
    Matrix aligned;  // B * R, R orthogonal
};

/// Blocks are n x d with columns orthonormal in the inner product `mass`.
/// After the orthogonal Procrustes rotation each aligned column is made positive at the sign
/// anchor of the corresponding column of A.
inline SubspaceDistance align_subspaces(const Matrix& a, const Matrix& b, const SparseMatrix& mass) {
    if (a.cols() != b.cols() || a.rows() != b.rows())
        fail(ErrorKind::invalid_input, "align_subspaces: block dimensions differ (eigenvalue crossing?)");
    const Matrix c = a.transpose() * (mass * b);
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SubspaceDistance out;
    // cosines from the SVD of A^T M B, sines from the part of B orthogonal to A; each angle uses
    // whichever of the two is well conditioned
    std::vector<double> cosv(svd.singularValues().data(), svd.singularValues().data() + c.cols());
    std::sort(cosv.begin(), cosv.end(), std::greater<>());
    const Matrix rest = b - a * c;
    const Matrix g = rest.transpose() * (mass * rest);
    Eigen::SelfAdjointEigenSolver<Matrix> sin_es(0.5 * (g + g.transpose()));
    std::vector<double> sinv;
    for (int i = 0; i < g.rows(); ++i) sinv.push_back(std::sqrt(std::max(0.0, sin_es.eigenvalues()[i])));
    std::sort(sinv.begin(), sinv.end());
    for (std::size_t i = 0; i < cosv.size(); ++i) {
        const double cs = std::clamp(cosv[i], -1.0, 1.0);
        out.angles.push_back(cs > std::sqrt(0.5) ? std::asin(std::min(1.0, sinv[i])) : std::acos(cs));
    }
    std::sort(out.angles.begin(), out.angles.end());
    out.max_angle = out.angles.empty() ? 0.0 : out.angles.back();
    out.aligned = b * (svd.matrixV() * svd.matrixU().transpose());
    for (int j = 0; j < a.cols(); ++j) {
        const int anchor = detail::sign_anchor(a.col(j));
        if (out.aligned(anchor, j) * a(anchor, j) < 0) out.aligned.col(j) *= -1.0;
    }
    return out;
}

/// Counting function N(lambda) and the two-dimensional Weyl prediction area * lambda / (4 pi).
struct WeylCount {
    int count = 0;
    double prediction = 0.0;
};

inline WeylCount weyl_count(const Spectrum& s, double lambda, double area) {
    require(!s.eigenvalues.empty() && lambda < s.eigenvalues.back(),
            "weyl_count: lambda must lie below the largest computed eigenvalue");
    WeylCount w;
    w.count = static_cast<int>(std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(),
                                             [&](double l) { return l <= lambda; }));
    w.prediction = area * lambda / (4.0 * std::numbers::pi);
    return w;
}

}  // namespace nodal_lab
