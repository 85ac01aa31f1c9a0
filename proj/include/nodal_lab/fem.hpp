#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <vector>

#include "nodal_lab/mesh.hpp"

namespace nodal_lab {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

enum class BoundaryCondition { closed, dirichlet };

/// P1 stiffness/mass pair on the free (non-Dirichlet) vertices.
struct DiscreteOperator {
    SparseMatrix stiffness;
    SparseMatrix mass;
    BoundaryCondition bc = BoundaryCondition::closed;
    std::vector<char> dirichlet_mask;   // per mesh vertex
    std::vector<int> free_vertices;     // free index -> mesh vertex
    std::vector<int> vertex_to_free;    // mesh vertex -> free index or -1
    int non_delaunay_edges = 0;         // edges whose cotangent weight is negative

    int free_count() const { return static_cast<int>(free_vertices.size()); }
    int vertex_count() const { return static_cast<int>(vertex_to_free.size()); }

    /// Free-space vector -> per-vertex vector (zero on Dirichlet vertices).
    Vector expand(const Vector& free) const {
        Vector u = Vector::Zero(vertex_count());
        for (int i = 0; i < free_count(); ++i) u[free_vertices[i]] = free[i];
        return u;
    }

    Vector restrict(const Vector& u) const {
        Vector f(free_count());
        for (int i = 0; i < free_count(); ++i) f[i] = u[free_vertices[i]];
        return f;
    }
};

/// Element matrices of one triangle from its side lengths (side k opposite local vertex k).
struct ElementMatrices {
    double stiffness[3][3];
    double mass[3][3];
};

inline ElementMatrices element_matrices(const std::array<double, 3>& l, bool lumped = false) {
    const double area = heron_area(l[0], l[1], l[2]);
    if (!(area > 0.0)) fail(ErrorKind::geometry, "assemble: nonpositive triangle area");
    ElementMatrices e{};
    double cot[3];
    for (int k = 0; k < 3; ++k) {
        const double a = l[k], b = l[(k + 1) % 3], c = l[(k + 2) % 3];
        cot[k] = (b * b + c * c - a * a) / (4.0 * area);
    }
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        e.stiffness[i][j] = e.stiffness[j][i] = -0.5 * cot[k];
    }
    for (int k = 0; k < 3; ++k) e.stiffness[k][k] = 0.5 * (cot[(k + 1) % 3] + cot[(k + 2) % 3]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (lumped)
                e.mass[i][j] = i == j ? area / 3.0 : 0.0;
            else
                e.mass[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
        }
    return e;
}

/// Cotangent stiffness and consistent (or lumped) mass from edge lengths alone.
/// Dirichlet vertices (every boundary loop vertex) are eliminated.
inline DiscreteOperator assemble(const IntrinsicMesh& mesh, BoundaryCondition bc, bool lumped = false) {
    DiscreteOperator op;
    op.bc = bc;
    op.dirichlet_mask.assign(mesh.vertex_count(), 0);
    if (bc == BoundaryCondition::dirichlet) {
        if (mesh.closed()) fail(ErrorKind::invalid_input, "assemble: Dirichlet condition needs a boundary");
        op.dirichlet_mask = mesh.boundary_mask();
    }
    op.vertex_to_free.assign(mesh.vertex_count(), -1);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (op.dirichlet_mask[v]) continue;
        op.vertex_to_free[v] = static_cast<int>(op.free_vertices.size());
        op.free_vertices.push_back(v);
    }
    const int n = op.free_count();
    std::vector<Eigen::Triplet<double>> kt, mt;
    kt.reserve(9 * mesh.triangle_count());
    mt.reserve(9 * mesh.triangle_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto e = element_matrices(mesh.side_lengths(t), lumped);
        const auto& tr = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int fi = op.vertex_to_free[tr[i]];
            if (fi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int fj = op.vertex_to_free[tr[j]];
                if (fj < 0) continue;
                kt.emplace_back(fi, fj, e.stiffness[i][j]);
                if (e.mass[i][j] != 0.0) mt.emplace_back(fi, fj, e.mass[i][j]);
            }
        }
    }
    op.stiffness.resize(n, n);
    op.mass.resize(n, n);
    op.stiffness.setFromTriplets(kt.begin(), kt.end());
    op.mass.setFromTriplets(mt.begin(), mt.end());

    for (int e = 0; e < mesh.edge_count(); ++e) {
        double w = 0.0;
        for (int t : mesh.edge_tris[e]) {
            if (t < 0) continue;
            const auto& te = mesh.tri_edges[t];
            const int k = static_cast<int>(std::find(te.begin(), te.end(), e) - te.begin());
            const auto l = mesh.side_lengths(t);
            const double a = l[k], b = l[(k + 1) % 3], c = l[(k + 2) % 3];
            w += (b * b + c * c - a * a) / (4.0 * heron_area(l[0], l[1], l[2]));
        }
        if (w < 0.0) ++op.non_delaunay_edges;
    }
    return op;
}

/// u^T K u / u^T M u for a per-vertex vector (Dirichlet entries ignored).
inline double rayleigh(const DiscreteOperator& op, const Vector& u) {
    const Vector f = op.restrict(u);
    const double den = f.dot(op.mass * f);
    if (!(den > 0.0)) fail(ErrorKind::invalid_input, "rayleigh: zero mass norm");
    return f.dot(op.stiffness * f) / den;
}

/// Coordinate-format dump "row col value", sorted lexicographically.
inline void dump_coo(std::ostream& os, const SparseMatrix& a) {
    std::vector<std::tuple<int, int, double>> entries;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    std::sort(entries.begin(), entries.end());
    os << std::setprecision(17);
    for (const auto& [r, c, v] : entries) os << r << ' ' << c << ' ' << v << '\n';
}

}  // namespace nodal_lab
