#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nodal_lab/fem.hpp"
#include "nodal_lab/geodesic.hpp"
#include "nodal_lab/mesh.hpp"

namespace nodal_lab {

/// Relative size of the nudge applied to vertex values that sit exactly on the level.
inline constexpr double kTiebreak = 1e-14;

struct NodalSegment {
    int tri;
    int edge_a, edge_b;  // mesh edges carrying the endpoints
    Point a, b;
    Region region;
};

/// Polyline level set {u = level}; one straight segment per straddling triangle.
struct NodalSet {
    double level = 0.0;
    std::vector<NodalSegment> segments;
    std::vector<int> component;  // per segment
    int component_count = 0;

    bool empty() const { return segments.empty(); }
};

namespace detail {

/// u - level with exact zeros nudged upward.
inline std::vector<double> shifted_values(const Vector& u, double level) {
    std::vector<double> f(u.size());
    double mx = 0.0;
    for (int i = 0; i < u.size(); ++i) f[i] = u[i] - level, mx = std::max(mx, std::abs(f[i]));
    for (double& x : f)
        if (x == 0.0) x = kTiebreak * mx;
    return f;
}

inline Point edge_point(const IntrinsicMesh& mesh, int a, int b, double t) {
    const Point& pa = mesh.points[a];
    const Point d = mesh.chart.kind == Chart::Kind::none ? mesh.points[b] - pa : mesh.chart.delta(pa, mesh.points[b]);
    return pa + t * d;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a), b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
    const Point v = b - a;
    const double vv = dot(v, v);
    const double t = vv > 0 ? std::clamp(dot(p - a, v) / vv, 0.0, 1.0) : 0.0;
    return norm(p - (a + t * v));
}

}  // namespace detail

/// Marching-triangles extraction of {u = level}. Crossing points are computed once per edge from its
/// lower-indexed vertex, so adjacent triangles share them bitwise.
inline NodalSet extract_level_set(const IntrinsicMesh& mesh, const Vector& u, double level = 0.0) {
    require(u.size() == mesh.vertex_count(), "extract_level_set: vector size must equal the vertex count");
    const auto f = detail::shifted_values(u, level);
    NodalSet set;
    set.level = level;
    std::vector<Point> crossing(mesh.edge_count());
    std::vector<char> crossed(mesh.edge_count(), 0);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto [a, b] = mesh.edges[e];
        if ((f[a] > 0) == (f[b] > 0)) continue;
        crossed[e] = 1;
        crossing[e] = detail::edge_point(mesh, a, b, f[a] / (f[a] - f[b]));
    }
    detail::UnionFind uf(mesh.edge_count());
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        int ends[2], n = 0;
        for (int e : mesh.tri_edges[t])
            if (crossed[e]) ends[n++] = e;
        if (n != 2) continue;
        set.segments.push_back({t, ends[0], ends[1], crossing[ends[0]], crossing[ends[1]], mesh.regions[t]});
        uf.unite(ends[0], ends[1]);
    }
    std::vector<int> label(mesh.edge_count(), -1);
    for (const auto& s : set.segments) {
        int& l = label[uf.find(s.edge_a)];
        if (l < 0) l = set.component_count++;
        set.component.push_back(l);
    }
    return set;
}

/// Values suited to nodal extraction of a Dirichlet eigenfunction: each boundary vertex takes the mean
/// of its interior neighbours, so the boundary itself is not reported as nodal.
inline Vector lift_dirichlet_boundary(const IntrinsicMesh& mesh, const Vector& u) {
    Vector out = u;
    const auto mask = mesh.boundary_mask();
    const auto nb = mesh.vertex_neighbors();
    std::vector<int> orphans;  // boundary vertices without interior neighbours (corners)
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (!mask[v]) continue;
        double s = 0.0;
        int c = 0;
        for (const auto& [w, e] : nb[v])
            if (!mask[w]) s += u[w], ++c;
        if (c > 0)
            out[v] = s / c;
        else
            orphans.push_back(v);
    }
    for (int v : orphans) {
        double s = 0.0;
        int c = 0;
        for (const auto& [w, e] : nb[v])
            if (std::find(orphans.begin(), orphans.end(), w) == orphans.end()) s += out[w], ++c;
        out[v] = c > 0 ? s / c : 0.0;
    }
    return out;
}

/// Sign components of M minus the nodal set.
struct NodalDomains {
    std::vector<int> vertex_domain;
    std::vector<std::array<int, 2>> triangle_domain;  // domain of the (+, -) part of each triangle, -1 if absent
    std::vector<int> sign;                            // per domain
    std::vector<double> area;                         // per domain
    std::vector<double> inner_radius;                 // per domain, filled by inner_radius()
    int count = 0;
    int straddling = 0;
};

inline NodalDomains count_domains(const IntrinsicMesh& mesh, const Vector& u) {
    require(u.size() == mesh.vertex_count(), "count_domains: vector size must equal the vertex count");
    if (u.cwiseAbs().maxCoeff() == 0.0) fail(ErrorKind::invalid_input, "count_domains: function vanishes identically");
    const auto f = detail::shifted_values(u, 0.0);
    auto piece = [](int t, bool positive) { return 2 * t + (positive ? 0 : 1); };
    const int nt = mesh.triangle_count();
    std::vector<char> has(2 * nt, 0);
    NodalDomains d;
    for (int t = 0; t < nt; ++t) {
        bool pos = false, neg = false;
        for (int v : mesh.triangles[t]) (f[v] > 0 ? pos : neg) = true;
        has[piece(t, true)] = pos, has[piece(t, false)] = neg;
        d.straddling += pos && neg;
    }
    if (d.straddling == nt) fail(ErrorKind::invalid_input, "count_domains: every triangle straddles the nodal set");
    detail::UnionFind uf(2 * nt);
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& et = mesh.edge_tris[e];
        if (et[1] < 0) continue;
        const auto [a, b] = mesh.edges[e];
        for (bool s : {true, false})
            if ((f[a] > 0) == s || (f[b] > 0) == s) uf.unite(piece(et[0], s), piece(et[1], s));
    }
    std::vector<int> label(2 * nt, -1);
    d.triangle_domain.assign(nt, {-1, -1});
    for (int t = 0; t < nt; ++t) {
        const auto l = mesh.side_lengths(t);
        const double at = heron_area(l[0], l[1], l[2]);
        const auto& tr = mesh.triangles[t];
        for (bool s : {true, false}) {
            const int p = piece(t, s);
            if (!has[p]) continue;
            int& id = label[uf.find(p)];
            if (id < 0) {
                id = d.count++;
                d.sign.push_back(s ? 1 : -1);
                d.area.push_back(0.0);
            }
            d.triangle_domain[t][s ? 0 : 1] = id;
            // area of the part with sign s under linear interpolation
            int same = 0, lone = -1;
            for (int k = 0; k < 3; ++k)
                if ((f[tr[k]] > 0) == s) ++same;
            for (int k = 0; k < 3; ++k)
                if (((f[tr[k]] > 0) == s) == (same == 1)) lone = k;
            double frac = 1.0;
            if (same == 1 || same == 2) {
                const double fl = f[tr[lone]];
                const double t1 = fl / (fl - f[tr[(lone + 1) % 3]]), t2 = fl / (fl - f[tr[(lone + 2) % 3]]);
                frac = same == 1 ? t1 * t2 : 1.0 - t1 * t2;
            }
            d.area[id] += frac * at;
        }
    }
    d.vertex_domain.assign(mesh.vertex_count(), -1);
    for (int t = 0; t < nt; ++t)
        for (int v : mesh.triangles[t]) d.vertex_domain[v] = d.triangle_domain[t][f[v] > 0 ? 0 : 1];
    return d;
}

/// Mesh distance from every vertex to the level set united with the mesh boundary.
/// Straddling triangles seed their vertices with the exact in-triangle distance to the segment.
inline std::vector<double> distance_to_zero_set(const IntrinsicMesh& mesh, const NodalSet& set) {
    std::vector<DistanceSeed> seeds;
    for (const auto& loop : mesh.boundary_loops)
        for (int v : loop) seeds.push_back({v, 0.0});
    for (const auto& s : set.segments) {
        // unfold the triangle: vertex 0 at the origin, vertex 1 on the x axis
        const auto& tr = mesh.triangles[s.tri];
        const auto l = mesh.side_lengths(s.tri);
        const double c = l[2], bside = l[1], aside = l[0];
        const double x2 = (bside * bside - aside * aside + c * c) / (2.0 * c);
        const double y2 = std::sqrt(std::max(0.0, bside * bside - x2 * x2));
        const Point q[3] = {{0, 0, 0}, {c, 0, 0}, {x2, y2, 0}};
        auto local_point = [&](int e, const Point& p3) {
            const auto [a, b] = mesh.edges[e];
            const int ka = static_cast<int>(std::find(tr.begin(), tr.end(), a) - tr.begin());
            const int kb = static_cast<int>(std::find(tr.begin(), tr.end(), b) - tr.begin());
            // recover the interpolation parameter from the stored crossing point
            const Point& pa = mesh.points[a];
            const Point d = mesh.chart.kind == Chart::Kind::none ? mesh.points[b] - pa : mesh.chart.delta(pa, mesh.points[b]);
            const double dd = dot(d, d);
            const double t = dd > 0 ? std::clamp(dot(p3 - pa, d) / dd, 0.0, 1.0) : 0.5;
            return q[ka] + t * (q[kb] - q[ka]);
        };
        const Point pa = local_point(s.edge_a, s.a), pb = local_point(s.edge_b, s.b);
        for (int k = 0; k < 3; ++k) seeds.push_back({tr[k], detail::point_segment_distance(q[k], pa, pb)});
    }
    if (seeds.empty()) fail(ErrorKind::invalid_input, "distance_to_zero_set: empty nodal set on a closed mesh");
    return geodesic_distance(mesh, seeds);
}

/// Per-domain max distance from contained vertices to the domain boundary.
inline void inner_radius(const IntrinsicMesh& mesh, const NodalSet& set, NodalDomains& domains) {
    const auto dist = distance_to_zero_set(mesh, set);
    domains.inner_radius.assign(domains.count, 0.0);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const int id = domains.vertex_domain[v];
        if (id >= 0) domains.inner_radius[id] = std::max(domains.inner_radius[id], dist[v]);
    }
}

/// sqrt(lambda) * max over vertices of the distance to the zero set (nodal set plus boundary).
inline double wavelength_density(const IntrinsicMesh& mesh, const NodalSet& set, double lambda) {
    require(lambda > 0, "wavelength_density: lambda must be positive");
    const auto dist = distance_to_zero_set(mesh, set);
    return std::sqrt(lambda) * *std::max_element(dist.begin(), dist.end());
}

/// Symmetric Hausdorff distance between two polylines, sampled at the given pitch.
inline double hausdorff(const NodalSet& a, const NodalSet& b, double pitch) {
    require(!a.empty() && !b.empty(), "hausdorff: empty input");
    require(pitch > 0, "hausdorff: pitch must be positive");
    auto directed = [pitch](const NodalSet& x, const NodalSet& y) {
        double worst = 0.0;
        for (const auto& s : x.segments) {
            const int n = std::max(1, static_cast<int>(std::ceil(norm(s.b - s.a) / pitch)));
            for (int i = 0; i <= n; ++i) {
                const Point p = s.a + (static_cast<double>(i) / n) * (s.b - s.a);
                double best = 1e300;
                for (const auto& r : y.segments) best = std::min(best, detail::point_segment_distance(p, r.a, r.b));
                worst = std::max(worst, best);
            }
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

/// Keeps the segments whose triangles carry one of the given regions.
inline NodalSet restrict_to(const NodalSet& set, std::initializer_list<Region> regions) {
    NodalSet out;
    out.level = set.level;
    std::vector<int> relabel(set.component_count, -1);
    for (std::size_t i = 0; i < set.segments.size(); ++i) {
        if (std::find(regions.begin(), regions.end(), set.segments[i].region) == regions.end()) continue;
        out.segments.push_back(set.segments[i]);
        int& l = relabel[set.component[i]];
        if (l < 0) l = out.component_count++;
        out.component.push_back(l);
    }
    return out;
}

enum class Containment { contained, case_c, case_d1, case_d2, empty_in_m1 };

inline std::string_view to_string(Containment c) {
    switch (c) {
        case Containment::contained: return "CONTAINED_IN_M1_EPS0";
        case Containment::case_c: return "CASE_C";
        case Containment::case_d1: return "CASE_D1";
        case Containment::case_d2: return "CASE_D2";
        case Containment::empty_in_m1: return "EMPTY_IN_M1";
    }
    return "?";
}

struct ContainmentVerdict {
    Containment kind = Containment::contained;
    std::vector<Point> witnesses;
};

/// Component-level census of region tags. M1_BULK is the inside; collar and M2 the outside.
inline ContainmentVerdict classify_containment(const IntrinsicMesh& mesh, const NodalSet& set) {
    ContainmentVerdict v;
    if (set.empty()) return v;  // constant functions: nothing to contain
    std::vector<char> inside(set.component_count, 0), outside(set.component_count, 0);
    for (std::size_t i = 0; i < set.segments.size(); ++i)
        (set.segments[i].region == Region::m1_bulk ? inside : outside)[set.component[i]] = 1;
    bool any_inside = false, crossing = false, outside_only = false;
    for (int c = 0; c < set.component_count; ++c) {
        any_inside |= inside[c] != 0;
        crossing |= inside[c] && outside[c];
        outside_only |= !inside[c] && outside[c];
    }
    if (!any_inside)
        v.kind = Containment::empty_in_m1;
    else if (crossing)
        v.kind = outside_only ? Containment::case_d1 : Containment::case_c;
    else if (outside_only)
        v.kind = Containment::case_d2;
    if (v.kind == Containment::contained) return v;
    for (const auto& s : set.segments) {
        for (int e : {s.edge_a, s.edge_b}) {
            const auto& et = mesh.edge_tris[e];
            if (et[1] < 0) continue;
            const bool b0 = mesh.regions[et[0]] == Region::m1_bulk, b1 = mesh.regions[et[1]] == Region::m1_bulk;
            if (b0 != b1) v.witnesses.push_back(e == s.edge_a ? s.a : s.b);
        }
    }
    if (v.witnesses.empty())
        for (const auto& s : set.segments)
            if (s.region != Region::m1_bulk) {
                v.witnesses.push_back(s.a);
                break;
            }
    return v;
}

struct PayneResult {
    bool touches = false;
    double distance = 0.0;  // min distance from the nodal set to the outer boundary loop
};

/// Boundary contact of the nodal set of a Dirichlet second eigenfunction (values taken as given).
inline PayneResult payne_check(const IntrinsicMesh& mesh, const NodalSet& set, double touch_tol) {
    require(!mesh.boundary_loops.empty(), "payne_check: needs a domain with boundary");
    // outer loop: the longest one
    std::size_t outer = 0;
    double best_len = -1;
    for (std::size_t i = 0; i < mesh.boundary_loops.size(); ++i) {
        const auto& loop = mesh.boundary_loops[i];
        double len = 0;
        for (std::size_t k = 0; k < loop.size(); ++k) len += mesh.length(loop[k], loop[(k + 1) % loop.size()]);
        if (len > best_len) best_len = len, outer = i;
    }
    PayneResult r{false, 1e300};
    const auto& loop = mesh.boundary_loops[outer];
    for (const auto& s : set.segments)
        for (const Point& p : {s.a, s.b})
            for (std::size_t k = 0; k < loop.size(); ++k)
                r.distance = std::min(r.distance, detail::point_segment_distance(p, mesh.points[loop[k]],
                                                                                 mesh.points[loop[(k + 1) % loop.size()]]));
    r.touches = r.distance <= touch_tol;
    return r;
}

/// CSV: tri_id,x0,y0,x1,y1,region
inline void write_nodal_csv(std::ostream& os, const NodalSet& set) {
    os << "tri_id,x0,y0,x1,y1,region\n" << std::setprecision(17);
    for (const auto& s : set.segments)
        os << s.tri << ',' << s.a[0] << ',' << s.a[1] << ',' << s.b[0] << ',' << s.b[1] << ',' << to_string(s.region)
           << '\n';
}

/// SVG overlay of a nodal set on the mesh outline. Planar meshes are drawn as is; star-charted meshes
/// through the stereographic projection from the south pole.
inline void write_nodal_svg(std::ostream& os, const IntrinsicMesh& mesh, const NodalSet& set) {
    const bool sphere = mesh.chart.kind == Chart::Kind::star;
    auto proj = [&](const Point& p) -> std::array<double, 2> {
        if (!sphere) return {p[0], p[1]};
        const Point q = (1.0 / norm(p)) * p;
        const double d = std::max(1.0 + q[2], 1e-3);
        return {q[0] / d, q[1] / d};
    };
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    auto grow = [&](const std::array<double, 2>& p) {
        lo_x = std::min(lo_x, p[0]), hi_x = std::max(hi_x, p[0]);
        lo_y = std::min(lo_y, p[1]), hi_y = std::max(hi_y, p[1]);
    };
    if (sphere) {
        grow({-3, -3}), grow({3, 3});
    } else {
        for (const auto& p : mesh.points) grow(proj(p));
    }
    const double w = std::max(hi_x - lo_x, 1e-12), hgt = std::max(hi_y - lo_y, 1e-12);
    const double scale = 500.0 / std::max(w, hgt);
    auto x = [&](double v) { return 10.0 + (v - lo_x) * scale; };
    auto y = [&](double v) { return 10.0 + (hi_y - v) * scale; };
    std::ostringstream body;
    body << std::setprecision(6);
    for (const auto& loop : mesh.boundary_loops) {
        body << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
        for (int v : loop) {
            const auto p = proj(mesh.points[v]);
            body << x(p[0]) << ',' << y(p[1]) << ' ';
        }
        body << "\"/>\n";
    }
    if (sphere) body << "<circle cx=\"" << x(0) << "\" cy=\"" << y(0) << "\" r=\"" << scale << "\" fill=\"none\" stroke=\"gray\"/>\n";
    for (const auto& s : set.segments) {
        const auto a = proj(s.a), b = proj(s.b);
        if (std::abs(a[0]) > 3 || std::abs(a[1]) > 3 || std::abs(b[0]) > 3 || std::abs(b[1]) > 3) continue;
        body << "<line x1=\"" << x(a[0]) << "\" y1=\"" << y(a[1]) << "\" x2=\"" << x(b[0]) << "\" y2=\"" << y(b[1])
             << "\" stroke=\"" << (s.region == Region::m1_bulk || s.region == Region::omega1 ? "blue" : "red")
             << "\" stroke-width=\"1.5\"/>\n";
    }
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << static_cast<int>(20 + w * scale) << "\" height=\""
       << static_cast<int>(20 + hgt * scale) << "\">\n"
       << body.str() << "</svg>\n";
}

}  // namespace nodal_lab
