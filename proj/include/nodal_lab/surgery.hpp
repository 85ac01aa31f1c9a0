#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "nodal_lab/geodesic.hpp"
#include "nodal_lab/nodal.hpp"
#include "nodal_lab/patch.hpp"
#include "nodal_lab/polygon.hpp"
#include "nodal_lab/spectrum.hpp"

namespace nodal_lab {

// ---------------------------------------------------------------- metric helpers

inline double max_edge_length(const IntrinsicMesh& mesh) {
    return mesh.lengths.empty() ? 0.0 : *std::max_element(mesh.lengths.begin(), mesh.lengths.end());
}

/// Intrinsic diameter estimated by repeated farthest-point sweeps (exact on most meshes, never above).
inline double metric_diameter(const IntrinsicMesh& mesh) {
    int v = 0;
    double best = 0.0;
    for (int sweep = 0; sweep < 4; ++sweep) {
        const auto d = geodesic_distance(mesh, v);
        const auto it = std::max_element(d.begin(), d.end());
        if (*it <= best && sweep > 0) break;
        best = std::max(best, *it);
        v = static_cast<int>(it - d.begin());
    }
    return best;
}

/// Largest intrinsic distance between two vertices of the loop.
inline double loop_diameter(const IntrinsicMesh& mesh, const std::vector<int>& loop) {
    double best = 0.0;
    for (int s : loop) {
        const auto d = geodesic_distance(mesh, s);
        for (int t : loop) best = std::max(best, d[t]);
    }
    return best;
}

// ---------------------------------------------------------------- connected sum

struct GluedSpec {
    double epsilon = 0.1;     // metric radius of the ball removed from M1
    double epsilon0 = 0.3;    // collar radius; triangles of M1 closer than this to x1 are tagged collar
    Point x1{};               // gluing point on M1 (a point of the surface)
    Point x2{};               // center of the ball removed from M2
    double m2_radius = 0.05;  // eta: M2(eta) is rescaled by epsilon / eta
    double cut1 = 0.0;        // local patch radii (0 picks one from the mesh size)
    double cut2 = 0.0;
    double anchor1 = 0.0;     // ring lattice anchor on M1 (0: the hole radius)
    int loop_nodes = 32;
    double D = 0.0;           // diam(M2(1)), filled in by connected_sum
    double D_tilde = 0.0;     // diameter of the gluing circle measured in M2(1)
};

struct GluedMesh {
    IntrinsicMesh mesh;
    GluedSpec spec;
    std::vector<int> neck_loop;   // glued vertices of the identified circle
    std::vector<int> m2_vertex;   // glued vertex -> vertex of M2(eta), -1 on the M1 side
    double m2_area = 0.0;         // area of M2(eta) before rescaling
};

namespace detail {

inline double auto_cut(const IntrinsicMesh& mesh, double hole) {
    return std::max(1.6 * hole, hole + 2.0 * max_edge_length(mesh));
}

}  // namespace detail

/// M1(eps) # eps/eta * M2(eta): the M2 side keeps its edge lengths scaled by eps / eta, the loops are
/// identified with reversed direction so both sides keep a consistent orientation.
/// Points of the M2 side are decorative: they are inverted into the hole of M1.
inline GluedMesh connected_sum(const IntrinsicMesh& m1, const IntrinsicMesh& m2, GluedSpec spec) {
    require(m1.closed() && m2.closed(), "connected_sum: both surfaces must be closed");
    require(spec.epsilon > 0 && spec.m2_radius > 0, "connected_sum: radii must be positive");
    if (!(spec.epsilon < spec.epsilon0))
        fail(ErrorKind::invalid_input, "connected_sum: epsilon must stay below epsilon0");
    const int n = spec.loop_nodes;
    const double eta = spec.m2_radius;
    const LocalFrame f1 = LocalFrame::at(m1.chart, spec.x1);
    const LocalFrame f2 = LocalFrame::at(m2.chart, spec.x2);
    const double r1 = f1.local_radius(spec.epsilon);
    const double r2 = f2.local_radius(eta);
    if (spec.cut1 <= 0) spec.cut1 = detail::auto_cut(m1, r1);
    if (spec.cut2 <= 0) spec.cut2 = detail::auto_cut(m2, r2);
    const double anchor1 = spec.anchor1 > 0 ? spec.anchor1 : r1;

    const PatchResult p1 = polar_patch(m1, spec.x1, {spec.cut1, r1, 0.0, n, anchor1});
    const PatchResult p2 = polar_patch(m2, spec.x2, {spec.cut2, r2, 0.0, n, r2});
    if (p1.on_boundary || p2.on_boundary) fail(ErrorKind::geometry, "connected_sum: gluing point on a boundary");
    require(static_cast<int>(p1.hole_loop.size()) == n && static_cast<int>(p2.hole_loop.size()) == n,
            "connected_sum: gluing loops must have the requested node count");
    const IntrinsicMesh& a = p1.mesh;
    const IntrinsicMesh& b = p2.mesh;

    spec.D = metric_diameter(b) / eta;
    spec.D_tilde = loop_diameter(b, p2.hole_loop) / eta;
    if (!(spec.D > spec.D_tilde)) fail(ErrorKind::geometry, "connected_sum: M2 too small around its hole");

    // vertex map of the M2 side
    const int na = a.vertex_count();
    std::vector<int> from2(b.vertex_count(), -1);
    for (int j = 0; j < n; ++j) from2[p2.hole_loop[j]] = p1.hole_loop[(n - j) % n];
    GluedMesh out;
    out.spec = spec;
    out.m2_area = b.total_area();
    std::vector<Point> pts = a.points;
    out.m2_vertex.assign(na, -1);
    for (int j = 0; j < n; ++j) out.m2_vertex[p1.hole_loop[(n - j) % n]] = p2.hole_loop[j];
    const double s = spec.epsilon / eta;
    for (int v = 0; v < b.vertex_count(); ++v) {
        if (from2[v] >= 0) continue;
        from2[v] = static_cast<int>(pts.size());
        out.m2_vertex.push_back(v);
        // inversion through the gluing circle, decorative only
        double rho = 0.0, psi = 0.0;
        if (const auto l = f2.local(b.points[v])) {
            const double r = std::hypot((*l)[0], (*l)[1]);
            if (r > 0) {
                rho = r1 * r2 / r;
                psi = p1.theta0 - (std::atan2(p2.orientation * (*l)[1], (*l)[0]) - p2.theta0);
            }
        }
        pts.push_back(f1.lift(rho * std::cos(psi), p1.orientation * rho * std::sin(psi)));
    }

    std::vector<Tri> tris;
    std::vector<Region> regs;
    for (int t = 0; t < a.triangle_count(); ++t) {
        tris.push_back(a.triangles[t]);
        Region reg = Region::m1_bulk;
        double cu = 0.0, cv = 0.0;
        bool valid = true;
        for (int v : a.triangles[t]) {
            const auto l = f1.local(a.points[v]);
            if (!l) {
                valid = false;
                break;
            }
            cu += (*l)[0] / 3.0, cv += (*l)[1] / 3.0;
        }
        if (valid && f1.metric_radius(std::hypot(cu, cv)) < spec.epsilon0) reg = Region::m1_collar;
        regs.push_back(reg);
    }
    for (const auto& t : b.triangles) {
        tris.push_back({from2[t[0]], from2[t[1]], from2[t[2]]});
        regs.push_back(Region::m2);
    }
    const auto& m2v = out.m2_vertex;
    auto length = [&](int u, int v) {
        if (u < static_cast<int>(m2v.size()) && v < static_cast<int>(m2v.size()) && m2v[u] >= 0 && m2v[v] >= 0)
            if (const auto e = b.find_edge(m2v[u], m2v[v])) return s * b.lengths[*e];
        return a.length(u, v);
    };
    out.mesh = IntrinsicMesh::build(std::move(pts), std::move(tris), std::move(regs), m1.chart, length);
    out.neck_loop = p1.hole_loop;
    return out;
}

// ---------------------------------------------------------------- domain attachment

struct AttachSpec {
    double epsilon = 0.1;
    Point x1{};          // point on a straight piece of the boundary of Omega
    double cut = 0.0;    // patch radius (0 picks one from the mesh size)
    double anchor = 0.0; // ring lattice anchor (0: epsilon)
    int loop_nodes = 32;
};

struct AttachedMesh {
    IntrinsicMesh mesh;
    std::vector<int> seam;  // vertices shared by both pieces
};

/// Omega \ B(x1, eps) joined with eps * Omega2 placed at x1. Omega2 is a planar mesh whose boundary
/// contains `loop_nodes` equally spaced nodes on the unit circle about the origin: its half facing
/// Omega fills the removed half ball and the rest protrudes through the boundary.
inline AttachedMesh attach_domain(const IntrinsicMesh& omega, const IntrinsicMesh& omega2, AttachSpec spec) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    require(omega.chart.kind == Chart::Kind::planar && omega2.chart.kind == Chart::Kind::planar,
            "attach_domain: both pieces must be planar");
    require(spec.epsilon > 0 && spec.loop_nodes >= 8 && spec.loop_nodes % 2 == 0,
            "attach_domain: need epsilon > 0 and an even node count");
    const int n = spec.loop_nodes;
    if (spec.cut <= 0) spec.cut = detail::auto_cut(omega, spec.epsilon);
    const double anchor = spec.anchor > 0 ? spec.anchor : spec.epsilon;
    const PatchResult p = polar_patch(omega, spec.x1, {spec.cut, spec.epsilon, 0.0, n, anchor});
    if (!p.on_boundary) fail(ErrorKind::geometry, "attach_domain: x1 must lie on the boundary of Omega");

    // socket nodes of Omega2 on the unit circle
    std::vector<std::pair<double, int>> socket;
    for (const auto& loop : omega2.boundary_loops)
        for (int v : loop) {
            const auto& q = omega2.points[v];
            if (std::abs(std::hypot(q[0], q[1]) - 1.0) < 1e-9) socket.emplace_back(std::atan2(q[1], q[0]), v);
        }
    if (static_cast<int>(socket.size()) != n)
        fail(ErrorKind::invalid_input, "attach_domain: Omega2 needs loop_nodes boundary nodes on the unit circle");
    std::sort(socket.begin(), socket.end());
    for (int k = 0; k < n; ++k) {
        double gap = (k + 1 < n ? socket[k + 1].first : socket[0].first + two_pi) - socket[k].first;
        if (std::abs(gap - two_pi / n) > 1e-9) fail(ErrorKind::invalid_input, "attach_domain: socket nodes are not equally spaced");
    }

    // rotation taking socket node 0 onto the first hole node, in plane angles
    const double sig = p.orientation;
    const double rot = sig * p.theta0 - socket[0].first;
    const double c = std::cos(rot), sn = std::sin(rot);
    const Point& x = spec.x1;
    auto place = [&](const Point& q) {
        return Point{x[0] + spec.epsilon * (c * q[0] - sn * q[1]), x[1] + spec.epsilon * (sn * q[0] + c * q[1]), 0.0};
    };

    const IntrinsicMesh& a = p.mesh;
    std::vector<Point> pts = a.points;
    std::vector<int> from2(omega2.vertex_count(), -1);
    AttachedMesh out;
    for (int i = 0; i <= n / 2; ++i) {
        // hole node i sits at plane angle sig * (theta0 + 2 pi i / n)
        const int k = sig > 0 ? i % n : (n - i) % n;
        from2[socket[k].second] = p.hole_loop[i];
        const Point q = place(omega2.points[socket[k].second]);
        const Point& h = a.points[p.hole_loop[i]];
        if (std::hypot(q[0] - h[0], q[1] - h[1]) > 1e-9 * std::max(1.0, spec.epsilon))
            fail(ErrorKind::geometry, "attach_domain: socket does not match the hole arc");
        out.seam.push_back(p.hole_loop[i]);
    }

    std::vector<Point2> outline;
    for (int v : omega.boundary_loops.front()) outline.push_back({omega.points[v][0], omega.points[v][1]});
    for (int v = 0; v < omega2.vertex_count(); ++v) {
        if (from2[v] >= 0) continue;
        const Point q = place(omega2.points[v]);
        // points outside the socket half must stay outside Omega
        const double ang = std::atan2(q[1] - x[1], q[0] - x[0]);
        double rel = std::remainder(sig * ang - p.theta0, two_pi);
        if (rel < 0) rel += two_pi;
        const bool socket_side = rel >= -1e-12 && rel <= std::numbers::pi + 1e-12;
        if (!socket_side && detail::inside_polygon(outline, {q[0], q[1]}))
            fail(ErrorKind::geometry, "attach_domain: attachment overlaps Omega");
        from2[v] = static_cast<int>(pts.size());
        pts.push_back(q);
    }

    std::vector<Tri> tris = a.triangles;
    std::vector<Region> regs(tris.size(), Region::omega1);
    // Omega2 triangles keep counter-clockwise orientation after placement
    const auto& t0 = omega2.triangles.front();
    const auto &q0 = omega2.points[t0[0]], &q1 = omega2.points[t0[1]], &q2 = omega2.points[t0[2]];
    const bool flip = (q1[0] - q0[0]) * (q2[1] - q0[1]) - (q1[1] - q0[1]) * (q2[0] - q0[0]) < 0;
    for (const auto& t : omega2.triangles) {
        tris.push_back(flip ? Tri{from2[t[0]], from2[t[2]], from2[t[1]]} : Tri{from2[t[0]], from2[t[1]], from2[t[2]]});
        regs.push_back(Region::omega2);
    }
    out.mesh = IntrinsicMesh::build(std::move(pts), std::move(tris), std::move(regs), Chart::planar());
    if (out.mesh.boundary_loops.size() != omega.boundary_loops.size())
        fail(ErrorKind::geometry, "attach_domain: attached boundary is not simple");
    return out;
}

// ---------------------------------------------------------------- perforation

struct PerforationSpec {
    std::vector<Point> centers;
    double radius = 0.05;    // hole radius epsilon
    double cut = 0.0;        // patch radius around each center (required)
    double anchor = 0.0;     // ring lattice anchor (0: the cut radius)
    int loop_nodes = 32;
    double clearance = std::numeric_limits<double>::infinity();  // distance of the centers to the nodal set
};

struct PerforatedMesh {
    IntrinsicMesh mesh;
    std::vector<std::vector<int>> hole_loops;
};

namespace detail {

inline PerforatedMesh apply_patches(const IntrinsicMesh& omega, const PerforationSpec& spec, double hole, double fill_to) {
    PerforatedMesh out{omega, {}};
    if (spec.centers.empty()) return out;
    require(spec.cut > 0, "perforate: a cut radius is required");
    if (!(spec.clearance > 0)) fail(ErrorKind::invalid_input, "perforate: centers must avoid the nodal set");
    if (hole > 0 && !(spec.radius < spec.clearance))
        fail(ErrorKind::invalid_input, "perforate: holes must not reach the nodal set");
    for (std::size_t i = 0; i < spec.centers.size(); ++i)
        for (std::size_t j = i + 1; j < spec.centers.size(); ++j)
            if (omega.chart.distance(spec.centers[i], spec.centers[j]) <= 2.0 * spec.cut)
                fail(ErrorKind::geometry, "perforate: balls overlap");
    const double anchor = spec.anchor > 0 ? spec.anchor : spec.cut;
    for (const auto& c : spec.centers) {
        const auto p = polar_patch(out.mesh, c, {spec.cut, hole, fill_to, spec.loop_nodes, anchor});
        if (p.on_boundary) fail(ErrorKind::geometry, "perforate: ball meets the boundary");
        for (auto& loop : out.hole_loops)
            for (int& v : loop) v = p.old_to_new[v];
        out.mesh = p.mesh;
        if (hole > 0) out.hole_loops.push_back(p.hole_loop);
    }
    return out;
}

}  // namespace detail

/// Removes balls of radius spec.radius around each center. No centers: the input, unchanged.
inline PerforatedMesh perforate(const IntrinsicMesh& omega, const PerforationSpec& spec) {
    require(spec.radius > 0, "perforate: radius must be positive");
    return detail::apply_patches(omega, spec, spec.radius, 0.0);
}

/// The same ring patches without holes, kept down to `fill_to`: every perforation with radius
/// at least fill_to on the lattice is a submesh of this reference.
inline PerforatedMesh perforation_reference(const IntrinsicMesh& omega, const PerforationSpec& spec, double fill_to) {
    return detail::apply_patches(omega, spec, 0.0, fill_to);
}

// ---------------------------------------------------------------- collar radius

struct CollarChoice {
    double epsilon0 = 0.0;
    double clearance = 0.0;  // min over the modes of the distance from x1 to their nodal sets
};

/// Distance from each vertex to the nearest nodal set of modes 1..m.
inline std::vector<double> nodal_clearance(const IntrinsicMesh& mesh, const Spectrum& spec, int m) {
    require(m >= 1 && m < spec.size(), "nodal_clearance: mode range out of bounds");
    std::vector<double> best(mesh.vertex_count(), std::numeric_limits<double>::infinity());
    for (int l = 1; l <= m; ++l) {
        const auto set = extract_level_set(mesh, spec.vector(l));
        if (set.empty()) continue;
        const auto d = distance_to_zero_set(mesh, set);
        for (int v = 0; v < mesh.vertex_count(); ++v) best[v] = std::min(best[v], d[v]);
    }
    return best;
}

/// Vertex farthest from every nodal set of modes 1..m (lowest index on ties).
inline int best_clearance_vertex(const IntrinsicMesh& mesh, const Spectrum& spec, int m) {
    const auto d = nodal_clearance(mesh, spec, m);
    return static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
}

/// epsilon0 = min(clearance / 3, cap): the collar stays clear of all low nodal sets.
inline CollarChoice choose_epsilon0(const IntrinsicMesh& mesh, const Spectrum& spec, int m, int x1,
                                    double cap = std::numeric_limits<double>::infinity()) {
    require(x1 >= 0 && x1 < mesh.vertex_count(), "choose_epsilon0: x1 out of range");
    const auto d = nodal_clearance(mesh, spec, m);
    CollarChoice c{std::min(d[x1] / 3.0, cap), d[x1]};
    if (!(c.clearance > 0)) fail(ErrorKind::geometry, "choose_epsilon0: x1 lies on a nodal set");
    return c;
}

}  // namespace nodal_lab
