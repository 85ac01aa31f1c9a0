#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nodal_lab/mesh.hpp"
#include "nodal_lab/rings.hpp"

namespace nodal_lab {

/// Two-dimensional polar coordinates around a point of a charted mesh.
/// Star charts use the gnomonic projection onto the tangent plane, so lift() and local() are exact inverses.
struct LocalFrame {
    Chart chart;
    Point center{};
    Point e1{1, 0, 0}, e2{0, 1, 0}, normal{0, 0, 1};

    static LocalFrame at(const Chart& chart, const Point& c) {
        require(chart.kind != Chart::Kind::none, "local frame needs a charted mesh");
        LocalFrame f{chart, c};
        if (chart.kind == Chart::Kind::star) {
            const auto& a = chart.axes;
            Point n{c[0] / (a[0] * a[0]), c[1] / (a[1] * a[1]), c[2] / (a[2] * a[2])};
            f.normal = (1.0 / norm(n)) * n;
            int k = 0;
            for (int i = 1; i < 3; ++i)
                if (std::abs(f.normal[i]) < std::abs(f.normal[k])) k = i;
            Point axis{0, 0, 0};
            axis[k] = 1.0;
            Point t = axis - dot(axis, f.normal) * f.normal;
            f.e1 = (1.0 / norm(t)) * t;
            f.e2 = cross(f.normal, f.e1);
        }
        return f;
    }

    std::optional<std::array<double, 2>> local(const Point& p) const {
        switch (chart.kind) {
            case Chart::Kind::star: {
                const double pn = dot(p, normal);
                if (pn <= 0.25 * norm(p)) return std::nullopt;
                const Point q = (dot(center, normal) / pn) * p - center;
                return std::array<double, 2>{dot(q, e1), dot(q, e2)};
            }
            case Chart::Kind::doubled:
                if (std::abs(p[2] - center[2]) > 0.5) return std::nullopt;
                [[fallthrough]];
            default: {
                const Point d = chart.delta(center, p);
                return std::array<double, 2>{d[0], d[1]};
            }
        }
    }

    Point lift(double u, double v) const {
        switch (chart.kind) {
            case Chart::Kind::star: {
                const Point q = center + u * e1 + v * e2;
                const auto& a = chart.axes;
                const double s = std::sqrt(std::pow(q[0] / a[0], 2) + std::pow(q[1] / a[1], 2) + std::pow(q[2] / a[2], 2));
                return (1.0 / s) * q;
            }
            case Chart::Kind::periodic: {
                auto wrap = [](double x, double p) {
                    x = std::fmod(x, p);
                    return x < 0 ? x + p : x;
                };
                return {wrap(center[0] + u, chart.period_x), wrap(center[1] + v, chart.period_y), 0.0};
            }
            default: return {center[0] + u, center[1] + v, center[2]};
        }
    }

    /// Local radius of the metric circle of radius r (exact on round spheres and flat charts).
    double local_radius(double r) const {
        if (chart.kind != Chart::Kind::star) return r;
        const double big = norm(center);
        if (r >= 0.4 * std::numbers::pi * big) fail(ErrorKind::geometry, "ball radius exceeds the chart neighbourhood");
        return big * std::tan(r / big);
    }

    double metric_radius(double local_r) const {
        if (chart.kind != Chart::Kind::star) return local_r;
        const double big = norm(center);
        return big * std::atan(local_r / big);
    }
};

/// Parameters of a polar patch: everything within `cut` of the center is replaced by concentric
/// rings on the lattice anchor * 2^(-j/p). Radii are in local chart units.
struct PatchSpec {
    double cut = 0.0;
    double hole = 0.0;       // > 0: leave a hole of this radius; 0: fill to the center
    double fill_to = 0.0;    // filled patches keep lattice rings down to this radius
    int loop_nodes = 32;     // nodes on a full ring
    double anchor = 1.0;
};

struct PatchResult {
    IntrinsicMesh mesh;
    std::vector<int> hole_loop;   // ring at the hole radius, by increasing angle
    std::vector<int> old_to_new;  // original vertex -> new index, -1 if removed
    double orientation = 1.0;     // +1 if the mesh orientation is counter-clockwise in (e1, e2)
    double theta0 = 0.0;          // polar angle of hole_loop[0], measured with the orientation applied
    bool on_boundary = false;     // the center sat on the mesh boundary (half rings)
};

namespace detail {

inline int lattice_exponent(int loop_nodes) {
    return std::max(1, static_cast<int>(std::lround(std::numbers::ln2 * loop_nodes / (2.0 * std::numbers::pi))));
}

}  // namespace detail

/// Replaces the neighbourhood of `center` by a polar ring patch. Handles interior centers and
/// centers on a straight piece of the mesh boundary (half rings).
inline PatchResult polar_patch(const IntrinsicMesh& mesh, const Point& center, const PatchSpec& spec) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    require(spec.cut > 0 && spec.hole >= 0 && spec.hole < spec.cut && spec.loop_nodes >= 8,
            "polar_patch: need 0 <= hole < cut and at least 8 loop nodes");
    const LocalFrame frame = LocalFrame::at(mesh.chart, center);
    const int nv = mesh.vertex_count();
    std::vector<std::optional<std::array<double, 2>>> loc(nv);
    for (int v = 0; v < nv; ++v) loc[v] = frame.local(mesh.points[v]);
    auto rad = [&](int v) { return std::hypot((*loc[v])[0], (*loc[v])[1]); };

    std::vector<char> removed(mesh.triangle_count(), 0);
    double signed_area = 0.0;
    std::map<Region, int> region_votes;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tr = mesh.triangles[t];
        bool inside = false, all_valid = true;
        for (int v : tr) {
            if (!loc[v]) all_valid = false;
            else if (rad(v) < spec.cut) inside = true;
        }
        if (!inside) continue;
        if (!all_valid) fail(ErrorKind::geometry, "polar_patch: ball leaves the chart neighbourhood");
        removed[t] = 1;
        ++region_votes[mesh.regions[t]];
        const auto &a = *loc[tr[0]], &b = *loc[tr[1]], &c = *loc[tr[2]];
        signed_area += (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    }
    if (region_votes.empty()) fail(ErrorKind::geometry, "polar_patch: cut radius below mesh resolution");
    const Region patch_region =
        std::max_element(region_votes.begin(), region_votes.end(),
                         [](const auto& x, const auto& y) { return x.second < y.second; })->first;
    const double sigma = signed_area > 0 ? 1.0 : -1.0;
    auto angle = [&](int v) { return std::atan2(sigma * (*loc[v])[1], (*loc[v])[0]); };

    // the removed region must be a disk: Euler characteristic 1
    {
        std::vector<char> vin(nv, 0);
        int f = 0, e = 0, vcount = 0;
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            if (!removed[t]) continue;
            ++f;
            for (int v : mesh.triangles[t]) vin[v] = 1;
        }
        for (int v = 0; v < nv; ++v) vcount += vin[v];
        for (int ed = 0; ed < mesh.edge_count(); ++ed) {
            const auto& et = mesh.edge_tris[ed];
            if ((et[0] >= 0 && removed[et[0]]) || (et[1] >= 0 && removed[et[1]])) ++e;
        }
        if (vcount - e + f != 1) fail(ErrorKind::geometry, "polar_patch: removed region is not a disk");
    }

    // cut edges directed as traversed by the removed triangle: increasing angle around the center
    std::vector<int> next(nv, -1), prev(nv, -1);
    bool boundary_mode = false;
    int cut_edges = 0;
    for (int ed = 0; ed < mesh.edge_count(); ++ed) {
        const auto& et = mesh.edge_tris[ed];
        const bool r0 = et[0] >= 0 && removed[et[0]], r1 = et[1] >= 0 && removed[et[1]];
        if (r0 && r1) continue;
        if (r0 || r1) {
            if (et[0] < 0 || et[1] < 0) {
                boundary_mode = true;
                continue;
            }
            const int t = r0 ? et[0] : et[1];
            auto [a, b] = mesh.edges[ed];
            if (!mesh.traverses(t, a, b)) std::swap(a, b);
            if (next[a] >= 0 || prev[b] >= 0) fail(ErrorKind::geometry, "polar_patch: cut is not a simple loop");
            next[a] = b, prev[b] = a;
            ++cut_edges;
        }
    }
    int start = -1;
    for (int v = 0; v < nv; ++v) {
        if (next[v] < 0) continue;
        if (boundary_mode ? prev[v] < 0 : start < 0) start = v;
    }
    if (start < 0) fail(ErrorKind::geometry, "polar_patch: empty cut");
    std::vector<detail::RingNode> chain{{start, angle(start), rad(start)}};
    double min_cut_radius = rad(start);
    for (int v = next[start]; v >= 0 && v != start; v = next[v]) {
        double a = angle(v);
        while (a <= chain.back().angle) a += two_pi;
        if (a - chain.back().angle >= std::numbers::pi)
            fail(ErrorKind::geometry, "polar_patch: cut loop is not star-shaped about the center");
        chain.push_back({v, a, rad(v)});
        min_cut_radius = std::min(min_cut_radius, rad(v));
    }
    if (static_cast<int>(chain.size()) != cut_edges + (boundary_mode ? 1 : 0))
        fail(ErrorKind::geometry, "polar_patch: cut is not a single loop");
    const double theta0 = chain.front().angle;
    double sweep = two_pi;
    if (boundary_mode) {
        sweep = chain.back().angle - theta0;
        // straight boundary: start, center and end are collinear
        if (std::abs(sweep - std::numbers::pi) > 1e-6)
            fail(ErrorKind::geometry, "polar_patch: boundary center must lie on a straight boundary piece");
    } else {
        const double closing = theta0 + two_pi - chain.back().angle;
        if (closing <= 0.0 || closing >= std::numbers::pi)
            fail(ErrorKind::geometry, "polar_patch: cut loop must wind exactly once around the center");
    }

    // lattice rings between the cut and the hole
    const int p = detail::lattice_exponent(spec.loop_nodes);
    const double q = std::pow(2.0, -1.0 / p);
    const double outer_limit = 0.9 * min_cut_radius;
    if (spec.hole >= outer_limit) fail(ErrorKind::geometry, "polar_patch: hole does not fit inside the cut");
    const double floor_radius = spec.hole > 0 ? spec.hole * (1.0 + 0.5 * (1.0 - q)) : spec.fill_to * (1.0 - 1e-9);
    std::vector<std::pair<double, int>> radii;  // radius, lattice index
    {
        int j = static_cast<int>(std::ceil(-p * std::log2(outer_limit / spec.anchor) - 1e-9));
        for (;; ++j) {
            const double r = spec.anchor * std::pow(2.0, -static_cast<double>(j) / p);
            if (r > outer_limit) continue;
            if (r < floor_radius || (spec.hole == 0 && r <= 0)) break;
            radii.emplace_back(r, j);
            if (spec.hole == 0 && spec.fill_to <= 0) break;
        }
    }
    if (spec.hole > 0) radii.emplace_back(spec.hole, 0);
    if (radii.empty()) radii.emplace_back(0.5 * outer_limit, 1);

    std::vector<Point> pts;
    std::vector<int> old_to_new(nv, -1);
    // keep vertices of surviving triangles
    std::vector<Tri> tris;
    std::vector<Region> regs;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (removed[t]) continue;
        Tri tr = mesh.triangles[t];
        for (int& v : tr) {
            if (old_to_new[v] < 0) {
                old_to_new[v] = static_cast<int>(pts.size());
                pts.push_back(mesh.points[v]);
            }
            v = old_to_new[v];
        }
        tris.push_back(tr);
        regs.push_back(mesh.regions[t]);
    }
    const std::size_t kept = tris.size();
    auto add_point = [&](double r, double a) {
        pts.push_back(frame.lift(r * std::cos(a), sigma * r * std::sin(a)));
        return static_cast<int>(pts.size()) - 1;
    };
    auto make_ring = [&](double r, int count, double phase) {
        std::vector<detail::RingNode> ring;
        if (boundary_mode) {
            for (int i = 0; i <= count; ++i) {
                const double a = theta0 + sweep * i / count;
                ring.push_back({add_point(r, a), a, r});
            }
        } else {
            for (int i = 0; i < count; ++i) {
                const double a = theta0 + phase + two_pi * i / count;
                ring.push_back({add_point(r, a), a, r});
            }
        }
        return ring;
    };
    const int count = boundary_mode ? std::max(2, static_cast<int>(std::lround(spec.loop_nodes * sweep / two_pi)))
                                    : spec.loop_nodes;
    // ring phases: the hole ring sits at angle theta0 + 2 pi i / N, others alternate half steps
    for (auto& c : chain) c.vertex = old_to_new[c.vertex];
    std::vector<detail::RingNode> outer = chain;
    std::vector<detail::RingNode> hole_ring;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const bool is_hole = spec.hole > 0 && k + 1 == radii.size();
        const double phase = is_hole ? 0.0 : (radii[k].second % 2 != 0 ? std::numbers::pi / count : 0.0);
        auto ring = make_ring(radii[k].first, count, phase);
        if (boundary_mode)
            detail::zip_open(ring, outer, tris);
        else
            detail::zip_closed(ring, outer, tris);
        outer = std::move(ring);
        if (is_hole) hole_ring = outer;
    }
    if (spec.hole == 0) {
        // structured disk inside the last ring
        const double r_last = radii.back().first;
        const int rings = std::max(1, static_cast<int>(std::lround(count / (boundary_mode ? 3.0 : 6.0))));
        for (int j = rings - 1; j >= 1; --j) {
            auto ring = make_ring(r_last * j / rings, boundary_mode ? 3 * j : 6 * j, 0.0);
            if (boundary_mode)
                detail::zip_open(ring, outer, tris);
            else
                detail::zip_closed(ring, outer, tris);
            outer = std::move(ring);
        }
        const int c = add_point(0.0, 0.0);
        const std::size_t n = outer.size();
        for (std::size_t i = 0; i + (boundary_mode ? 1 : 0) < n; ++i)
            tris.push_back({c, outer[i].vertex, outer[(i + 1) % n].vertex});
    }
    regs.resize(tris.size(), patch_region);
    (void)kept;

    PatchResult out{IntrinsicMesh::build(std::move(pts), std::move(tris), std::move(regs), mesh.chart), {}, old_to_new,
                    sigma, theta0, boundary_mode};
    for (const auto& rn : hole_ring) out.hole_loop.push_back(rn.vertex);
    return out;
}

/// Removes the metric ball of the given radius around a vertex, leaving a circular boundary loop.
/// The replaced region extends to `cut` (default: max(1.6 radius, radius + 2 local edge length)).
inline IntrinsicMesh remove_geodesic_ball(const IntrinsicMesh& mesh, int center, double radius, int loop_nodes = 32,
                                          double cut = 0.0) {
    require(center >= 0 && center < mesh.vertex_count(), "remove_geodesic_ball: center out of range");
    require(radius > 0, "remove_geodesic_ball: radius must be positive");
    const LocalFrame frame = LocalFrame::at(mesh.chart, mesh.points[center]);
    const double r = frame.local_radius(radius);
    if (cut <= 0) {
        double h = 0.0;
        const auto nb = mesh.vertex_neighbors();
        for (const auto& [w, e] : nb[center]) h = std::max(h, mesh.lengths[e]);
        cut = std::max(1.6 * r, r + 2.0 * h);
    }
    PatchSpec spec{cut, r, 0.0, loop_nodes, r};
    return polar_patch(mesh, mesh.points[center], spec).mesh;
}

namespace detail {

inline Point chart_midpoint(const Chart& chart, const Point& a, const Point& b) {
    const Point d = chart.delta(a, b);
    switch (chart.kind) {
        case Chart::Kind::star: {
            const Point q = 0.5 * (a + b);
            const auto& ax = chart.axes;
            const double s = std::sqrt(std::pow(q[0] / ax[0], 2) + std::pow(q[1] / ax[1], 2) + std::pow(q[2] / ax[2], 2));
            return (1.0 / s) * q;
        }
        case Chart::Kind::periodic: return LocalFrame::at(chart, a).lift(0.5 * d[0], 0.5 * d[1]);
        case Chart::Kind::doubled: return {a[0] + 0.5 * d[0], a[1] + 0.5 * d[1], std::max(a[2], b[2])};
        default: return {a[0] + 0.5 * d[0], a[1] + 0.5 * d[1], 0.0};
    }
}

}  // namespace detail

/// Longest-edge (Rivara) bisection of every triangle with a vertex within `radius` of `center`
/// whose longest edge exceeds 1.5 h_local. Conformity is kept by bisecting along the
/// longest-edge propagation path.
inline IntrinsicMesh refine_near(const IntrinsicMesh& mesh, const Point& center, double radius, double h_local) {
    require(h_local > 0 && radius >= 0, "refine_near: sizes must be positive");
    require(mesh.chart.kind != Chart::Kind::none, "refine_near: needs a charted mesh");
    std::vector<Point> pts = mesh.points;
    std::vector<Tri> tris = mesh.triangles;
    std::vector<Region> regs = mesh.regions;
    std::vector<char> alive(tris.size(), 1);
    std::unordered_map<std::uint64_t, std::vector<int>> edge_map;
    auto key = [](int a, int b) { return edge_hash(std::min(a, b), std::max(a, b)); };
    auto attach = [&](int t) {
        for (int k = 0; k < 3; ++k) edge_map[key(tris[t][k], tris[t][(k + 1) % 3])].push_back(t);
    };
    auto detach = [&](int t) {
        for (int k = 0; k < 3; ++k) {
            auto& v = edge_map[key(tris[t][k], tris[t][(k + 1) % 3])];
            v.erase(std::find(v.begin(), v.end(), t));
        }
    };
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) attach(t);
    auto len = [&](int a, int b) { return mesh.chart.distance(pts[a], pts[b]); };
    auto longest = [&](int t) {  // local index k: edge (k, k+1)
        int best = 0;
        double bl = -1.0;
        for (int k = 0; k < 3; ++k) {
            const double l = len(tris[t][k], tris[t][(k + 1) % 3]);
            if (l > bl * (1.0 + 1e-12)) bl = l, best = k;
        }
        return best;
    };
    auto neighbor = [&](int t, int k) {
        for (int s : edge_map[key(tris[t][k], tris[t][(k + 1) % 3])])
            if (s != t) return s;
        return -1;
    };
    auto bisect = [&](int a, int b) {
        const int m = static_cast<int>(pts.size());
        pts.push_back(detail::chart_midpoint(mesh.chart, pts[a], pts[b]));
        const auto owners = edge_map[key(a, b)];
        for (int t : owners) {
            detach(t);
            alive[t] = 0;
            Tri tr = tris[t];
            int k = 0;
            while (!((tr[k] == a && tr[(k + 1) % 3] == b) || (tr[k] == b && tr[(k + 1) % 3] == a))) ++k;
            const int x = tr[k], y = tr[(k + 1) % 3], c = tr[(k + 2) % 3];
            for (Tri child : {Tri{x, m, c}, Tri{m, y, c}}) {
                tris.push_back(child);
                regs.push_back(regs[t]);
                alive.push_back(1);
                attach(static_cast<int>(tris.size()) - 1);
            }
        }
    };
    const LocalFrame frame = LocalFrame::at(mesh.chart, center);
    auto wants = [&](int t) {
        if (!alive[t]) return false;
        const int k = longest(t);
        if (len(tris[t][k], tris[t][(k + 1) % 3]) <= 1.5 * h_local) return false;
        for (int v : tris[t]) {
            const auto l = frame.local(pts[v]);
            if (l && std::hypot((*l)[0], (*l)[1]) < radius) return true;
        }
        return false;
    };
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        while (wants(t)) {
            // walk the longest-edge propagation path to a terminal edge and bisect it
            int cur = t;
            for (int guard = 0; guard < 10000; ++guard) {
                const int k = longest(cur);
                const int nb = neighbor(cur, k);
                if (nb < 0) {
                    bisect(tris[cur][k], tris[cur][(k + 1) % 3]);
                    break;
                }
                const int kn = longest(nb);
                const int a = tris[cur][k], b = tris[cur][(k + 1) % 3];
                const int na = tris[nb][kn], nbv = tris[nb][(kn + 1) % 3];
                if ((na == a && nbv == b) || (na == b && nbv == a)) {
                    bisect(a, b);
                    break;
                }
                cur = nb;
            }
        }
    }
    std::vector<Tri> out_t;
    std::vector<Region> out_r;
    for (std::size_t t = 0; t < tris.size(); ++t)
        if (alive[t]) out_t.push_back(tris[t]), out_r.push_back(regs[t]);
    return IntrinsicMesh::build(std::move(pts), std::move(out_t), std::move(out_r), mesh.chart);
}

}  // namespace nodal_lab
