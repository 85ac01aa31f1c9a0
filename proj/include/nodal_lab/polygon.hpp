#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "nodal_lab/mesh.hpp"

namespace nodal_lab {

using Point2 = std::array<double, 2>;

namespace detail {

inline double orient2d(const Point2& a, const Point2& b, const Point2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

/// > 0 iff d lies strictly inside the circumcircle of the counter-clockwise triangle (a, b, c).
inline double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double adx = a[0] - d[0], ady = a[1] - d[1];
    const double bdx = b[0] - d[0], bdy = b[1] - d[1];
    const double cdx = c[0] - d[0], cdy = c[1] - d[1];
    const double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double d1 = orient2d(a, b, c), d2 = orient2d(a, b, d);
    const double d3 = orient2d(c, d, a), d4 = orient2d(c, d, b);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    auto on = [](const Point2& p, const Point2& q, const Point2& r, double o) {
        return o == 0 && std::min(p[0], q[0]) <= r[0] && r[0] <= std::max(p[0], q[0]) && std::min(p[1], q[1]) <= r[1] &&
               r[1] <= std::max(p[1], q[1]);
    };
    return on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4);
}

inline bool inside_polygon(const std::vector<Point2>& poly, const Point2& p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto &a = poly[i], &b = poly[j];
        if ((a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]) in = !in;
    }
    return in;
}

inline double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double vx = b[0] - a[0], vy = b[1] - a[1];
    const double t = std::clamp(((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
    return std::hypot(p[0] - a[0] - t * vx, p[1] - a[1] - t * vy);
}

/// Bowyer-Watson Delaunay triangulation; returns counter-clockwise triangles over pts.
/// The cavity is grown from the triangle containing the new point and trimmed until every
/// cavity edge is visible from it, which keeps the mesh valid under inconsistent incircle signs.
inline std::vector<Tri> delaunay(const std::vector<Point2>& pts) {
    double lo_x = pts[0][0], hi_x = lo_x, lo_y = pts[0][1], hi_y = lo_y;
    for (const auto& p : pts) {
        lo_x = std::min(lo_x, p[0]), hi_x = std::max(hi_x, p[0]);
        lo_y = std::min(lo_y, p[1]), hi_y = std::max(hi_y, p[1]);
    }
    const double span = std::max(hi_x - lo_x, hi_y - lo_y) + 1.0;
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    std::vector<Point2> all = pts;
    const int n = static_cast<int>(pts.size());
    all.push_back({cx - 20 * span, cy - 10 * span});
    all.push_back({cx + 20 * span, cy - 10 * span});
    all.push_back({cx, cy + 20 * span});
    std::vector<Tri> tris{{n, n + 1, n + 2}};
    std::vector<std::array<int, 3>> nbr{{-1, -1, -1}};  // nbr[t][k]: across the edge opposite vertex k
    std::vector<char> alive{1};
    int last = 0;

    auto locate = [&](const Point2& p) {
        int t = last;
        for (int guard = 0; guard < 4 * static_cast<int>(tris.size()) + 16; ++guard) {
            int step = -1;
            for (int k = 0; k < 3 && step < 0; ++k)
                if (orient2d(all[tris[t][(k + 1) % 3]], all[tris[t][(k + 2) % 3]], p) < 0) step = nbr[t][k];
            if (step < 0) return t;
            t = step;
        }
        for (int s = 0; s < static_cast<int>(tris.size()); ++s) {  // walk cycled: scan
            if (!alive[s]) continue;
            bool in = true;
            for (int k = 0; k < 3; ++k) in &= orient2d(all[tris[s][(k + 1) % 3]], all[tris[s][(k + 2) % 3]], p) >= 0;
            if (in) return s;
        }
        return last;
    };

    std::vector<char> in_cavity(1, 0);
    for (int v = 0; v < n; ++v) {
        const Point2& p = all[v];
        const int seed = locate(p);
        in_cavity.resize(tris.size(), 0);
        std::vector<int> cavity{seed};
        in_cavity[seed] = 1;
        for (std::size_t i = 0; i < cavity.size(); ++i)
            for (int o : nbr[cavity[i]])
                if (o >= 0 && !in_cavity[o] && incircle(all[tris[o][0]], all[tris[o][1]], all[tris[o][2]], p) > 0) {
                    in_cavity[o] = 1;
                    cavity.push_back(o);
                }
        // trim triangles whose outer edges the new point cannot see, then keep the part connected to the seed
        for (bool changed = true; changed;) {
            changed = false;
            for (int t : cavity) {
                if (t == seed || !in_cavity[t]) continue;
                for (int k = 0; k < 3; ++k) {
                    const int o = nbr[t][k];
                    if ((o < 0 || !in_cavity[o]) &&
                        orient2d(all[tris[t][(k + 1) % 3]], all[tris[t][(k + 2) % 3]], p) <= 0) {
                        in_cavity[t] = 0;
                        changed = true;
                        break;
                    }
                }
            }
            std::vector<int> reach{seed};
            std::vector<char> seen(tris.size(), 0);
            seen[seed] = 1;
            for (std::size_t i = 0; i < reach.size(); ++i)
                for (int o : nbr[reach[i]])
                    if (o >= 0 && in_cavity[o] && !seen[o]) seen[o] = 1, reach.push_back(o);
            for (int t : cavity)
                if (in_cavity[t] && !seen[t]) in_cavity[t] = 0, changed = true;
            cavity = std::move(reach);
        }
        // fan of new triangles over the cavity boundary
        std::map<int, int> starts_at, ends_at;  // boundary edge (a, b): new triangle by a and by b
        std::vector<int> created;
        for (int t : cavity) {
            for (int k = 0; k < 3; ++k) {
                const int o = nbr[t][k];
                if (o >= 0 && in_cavity[o]) continue;
                const int a = tris[t][(k + 1) % 3], b = tris[t][(k + 2) % 3];
                const int id = static_cast<int>(tris.size());
                tris.push_back({a, b, v});
                nbr.push_back({-1, -1, o});
                alive.push_back(1);
                if (o >= 0)
                    for (int j = 0; j < 3; ++j)
                        if (nbr[o][j] == t) nbr[o][j] = id;
                starts_at[a] = id, ends_at[b] = id;
                created.push_back(id);
            }
        }
        for (int id : created) {
            nbr[id][0] = starts_at.at(tris[id][1]);  // edge (b, v)
            nbr[id][1] = ends_at.at(tris[id][0]);    // edge (v, a)
        }
        for (int t : cavity) alive[t] = 0, in_cavity[t] = 0;
        last = created.back();
    }
    std::vector<Tri> out;
    for (std::size_t t = 0; t < tris.size(); ++t)
        if (alive[t] && tris[t][0] < n && tris[t][1] < n && tris[t][2] < n) out.push_back(tris[t]);
    return out;
}

}  // namespace detail

/// Conforming Delaunay triangulation of a simple polygon with target edge length h.
inline IntrinsicMesh build_polygon(std::vector<Point2> boundary, double h) {
    require(h > 0, "build_polygon: h must be positive");
    const std::size_t nb = boundary.size();
    require(nb >= 3, "build_polygon: need at least three vertices");
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = i + 1; j < nb; ++j) {
            if (j == i + 1 || (i == 0 && j == nb - 1)) {
                if (boundary[i] == boundary[j]) fail(ErrorKind::invalid_input, "build_polygon: repeated vertex");
                continue;
            }
            if (detail::segments_cross(boundary[i], boundary[(i + 1) % nb], boundary[j], boundary[(j + 1) % nb]))
                fail(ErrorKind::invalid_input, "build_polygon: boundary self-intersects");
        }
    double area2 = 0.0;
    for (std::size_t i = 0; i < nb; ++i)
        area2 += boundary[i][0] * boundary[(i + 1) % nb][1] - boundary[(i + 1) % nb][0] * boundary[i][1];
    if (area2 == 0.0) fail(ErrorKind::invalid_input, "build_polygon: zero area");
    if (area2 < 0) std::reverse(boundary.begin(), boundary.end());

    // boundary resampled at h, as a list of constrained segments
    std::vector<Point2> pts;
    std::vector<std::pair<int, int>> segments;
    for (std::size_t i = 0; i < nb; ++i) {
        const auto &a = boundary[i], &b = boundary[(i + 1) % nb];
        const int pieces = std::max(1, static_cast<int>(std::ceil(std::hypot(b[0] - a[0], b[1] - a[1]) / h - 1e-9)));
        for (int k = 0; k < pieces; ++k) {
            const double t = static_cast<double>(k) / pieces;
            pts.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
        }
    }
    const int nbp = static_cast<int>(pts.size());
    for (int i = 0; i < nbp; ++i) segments.emplace_back(i, (i + 1) % nbp);

    // interior points on a triangular lattice, kept half a spacing away from the boundary
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& p : boundary) {
        lo_x = std::min(lo_x, p[0]), hi_x = std::max(hi_x, p[0]);
        lo_y = std::min(lo_y, p[1]), hi_y = std::max(hi_y, p[1]);
    }
    const double dy = h * std::sqrt(3.0) / 2.0;
    for (int row = 1; lo_y + row * dy < hi_y; ++row) {
        const double y = lo_y + row * dy;
        for (double x = lo_x + (row % 2 ? 0.5 * h : h); x < hi_x; x += h) {
            const Point2 p{x, y};
            if (!detail::inside_polygon(boundary, p)) continue;
            double clearance = 1e300;
            for (std::size_t i = 0; i < nb; ++i)
                clearance = std::min(clearance, detail::segment_distance(p, boundary[i], boundary[(i + 1) % nb]));
            if (clearance > 0.45 * h) pts.push_back(p);
        }
    }

    // recover missing boundary segments by midpoint splitting
    std::vector<Tri> tris;
    for (int round = 0;; ++round) {
        if (round > 50) fail(ErrorKind::geometry, "build_polygon: boundary recovery did not terminate");
        tris = detail::delaunay(pts);
        std::map<std::pair<int, int>, int> present;
        for (const auto& t : tris)
            for (int k = 0; k < 3; ++k) present[{t[k], t[(k + 1) % 3]}] = 1;
        std::vector<std::pair<int, int>> next;
        bool split = false;
        for (const auto& [a, b] : segments) {
            if (present.count({a, b})) {
                next.emplace_back(a, b);
                continue;
            }
            const int m = static_cast<int>(pts.size());
            pts.push_back({0.5 * (pts[a][0] + pts[b][0]), 0.5 * (pts[a][1] + pts[b][1])});
            next.emplace_back(a, m);
            next.emplace_back(m, b);
            split = true;
        }
        segments = std::move(next);
        if (!split) break;
    }
    std::vector<Tri> inside;
    for (const auto& t : tris) {
        const Point2 c{(pts[t[0]][0] + pts[t[1]][0] + pts[t[2]][0]) / 3.0, (pts[t[0]][1] + pts[t[1]][1] + pts[t[2]][1]) / 3.0};
        if (detail::inside_polygon(boundary, c)) inside.push_back(t);
    }
    std::vector<Point> p3;
    for (const auto& p : pts) p3.push_back({p[0], p[1], 0.0});
    return IntrinsicMesh::build(std::move(p3), std::move(inside), {}, Chart::planar());
}

}  // namespace nodal_lab
