#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "nodal_lab/mesh.hpp"
#include "nodal_lab/rings.hpp"

namespace nodal_lab {

/// Structured mesh of [0,width] x [0,height], every grid square split along the same diagonal.
inline IntrinsicMesh build_rectangle(double width, double height, double h) {
    require(width > 0 && height > 0 && h > 0, "build_rectangle: sizes must be positive");
    if (h > std::min(width, height)) fail(ErrorKind::invalid_input, "build_rectangle: h exceeds the short side");
    const int nx = static_cast<int>(std::ceil(width / h - 1e-9));
    const int ny = static_cast<int>(std::ceil(height / h - 1e-9));
    std::vector<Point> pts;
    pts.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) pts.push_back({width * i / nx, height * j / ny, 0.0});
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<Tri> tris;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return IntrinsicMesh::build(std::move(pts), std::move(tris), {}, Chart::planar());
}

/// Disk of given radius: a center vertex and concentric rings of 6j nodes; the outer ring gets
/// `boundary_nodes` nodes (0 = the natural 6J) so the disk can be stitched to a matching arc.
inline IntrinsicMesh build_disk(double radius, double h, int boundary_nodes = 0, Point center = {0, 0, 0}) {
    require(radius > 0 && h > 0, "build_disk: sizes must be positive");
    const int rings = std::max(1, static_cast<int>(std::ceil(radius / h - 1e-9)));
    std::vector<Point> pts{center};
    std::vector<std::vector<detail::RingNode>> ring_nodes;
    for (int j = 1; j <= rings; ++j) {
        const int n = (j == rings && boundary_nodes > 0) ? boundary_nodes : 6 * j;
        const double r = radius * j / rings;
        std::vector<detail::RingNode> ring;
        for (int i = 0; i < n; ++i) {
            const double a = 2.0 * std::numbers::pi * i / n;
            ring.push_back({static_cast<int>(pts.size()), a});
            pts.push_back({center[0] + r * std::cos(a), center[1] + r * std::sin(a), 0.0});
        }
        ring_nodes.push_back(std::move(ring));
    }
    std::vector<Tri> tris;
    const auto& r0 = ring_nodes[0];
    for (std::size_t i = 0; i < r0.size(); ++i) tris.push_back({0, r0[i].vertex, r0[(i + 1) % r0.size()].vertex});
    for (std::size_t j = 1; j < ring_nodes.size(); ++j) detail::zip_closed(ring_nodes[j - 1], ring_nodes[j], tris);
    return IntrinsicMesh::build(std::move(pts), std::move(tris), {}, Chart::planar());
}

namespace detail {

inline std::pair<std::vector<Point>, std::vector<Tri>> icosphere(int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Point> pts{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : pts) p = (1.0 / norm(p)) * p;
    std::vector<Tri> tris{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                          {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            Point p = 0.5 * (pts[a] + pts[b]);
            p = (1.0 / norm(p)) * p;
            const int id = static_cast<int>(pts.size());
            pts.push_back(p);
            mid.emplace(key, id);
            return id;
        };
        std::vector<Tri> next;
        next.reserve(tris.size() * 4);
        for (const auto& tr : tris) {
            const int a = midpoint(tr[0], tr[1]), b = midpoint(tr[1], tr[2]), c = midpoint(tr[2], tr[0]);
            next.push_back({tr[0], a, c});
            next.push_back({tr[1], b, a});
            next.push_back({tr[2], c, b});
            next.push_back({a, b, c});
        }
        tris = std::move(next);
    }
    return {std::move(pts), std::move(tris)};
}

}  // namespace detail

/// Icosphere on the unit sphere, chordal edge lengths.
inline IntrinsicMesh build_sphere(int subdivisions) {
    require(subdivisions >= 0, "build_sphere: subdivisions must be >= 0");
    auto [pts, tris] = detail::icosphere(subdivisions);
    return IntrinsicMesh::build(std::move(pts), std::move(tris), {}, Chart::star());
}

/// Icosphere stretched onto the ellipsoid with the given semi-axes. Generic axes break the
/// multiplicities of the round sphere.
inline IntrinsicMesh build_ellipsoid(int subdivisions, Point axes) {
    require(subdivisions >= 0, "build_ellipsoid: subdivisions must be >= 0");
    auto [pts, tris] = detail::icosphere(subdivisions);
    for (auto& p : pts) p = {p[0] * axes[0], p[1] * axes[1], p[2] * axes[2]};
    return IntrinsicMesh::build(std::move(pts), std::move(tris), {}, Chart::star(axes));
}

/// Flat torus R^2 / (side Z)^2 on a periodic grid.
inline IntrinsicMesh build_flat_torus(double side, double h) {
    require(side > 0 && h > 0, "build_flat_torus: sizes must be positive");
    const int n = std::max(3, static_cast<int>(std::ceil(side / h - 1e-9)));
    std::vector<Point> pts;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) pts.push_back({side * i / n, side * j / n, 0.0});
    auto id = [n](int i, int j) { return (j % n) * n + (i % n); };
    std::vector<Tri> tris;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return IntrinsicMesh::build(std::move(pts), std::move(tris), {}, Chart::periodic(side, side));
}

/// Closed orientable surface of genus `genus`: two copies of the planar block domain
/// [0, 2g+1] x [0, 3] minus g unit squares, glued along their common boundary. Each grid square is
/// split into four triangles around its center so no triangle lies entirely on the seam.
/// The result carries a `doubled` chart (z = sheet index).
inline IntrinsicMesh build_genus_surface(int genus, double h) {
    require(genus >= 1, "build_genus_surface: genus must be >= 1");
    require(h > 0, "build_genus_surface: h must be positive");
    const int s = std::max(2, static_cast<int>(std::ceil(1.0 / h - 1e-9)));
    const int nx = (2 * genus + 1) * s, ny = 3 * s;
    const double d = 1.0 / s;
    auto in_hole = [&](int ci, int cj) {  // cell (ci,cj) removed?
        const int bx = ci / s, by = cj / s;
        return by == 1 && bx % 2 == 1;
    };
    auto cell_present = [&](int ci, int cj) { return ci >= 0 && cj >= 0 && ci < nx && cj < ny && !in_hole(ci, cj); };
    // Grid nodes adjacent to any present cell; seam nodes are those also adjacent to a missing cell.
    std::vector<int> node_id((nx + 1) * (ny + 1), -1), node_bottom((nx + 1) * (ny + 1), -1);
    std::vector<Point> pts;
    auto nid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            int present = 0;
            for (int a = -1; a <= 0; ++a)
                for (int b = -1; b <= 0; ++b) present += cell_present(i + a, j + b);
            if (present == 0) continue;
            node_id[nid(i, j)] = static_cast<int>(pts.size());
            pts.push_back({i * d, j * d, 0.0});
            if (present < 4) {
                node_bottom[nid(i, j)] = node_id[nid(i, j)];
            }
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            if (node_id[nid(i, j)] < 0 || node_bottom[nid(i, j)] >= 0) continue;
            node_bottom[nid(i, j)] = static_cast<int>(pts.size());
            pts.push_back({i * d, j * d, 1.0});
        }
    std::vector<Tri> tris;
    for (int sheet = 0; sheet < 2; ++sheet)
        for (int cj = 0; cj < ny; ++cj)
            for (int ci = 0; ci < nx; ++ci) {
                if (!cell_present(ci, cj)) continue;
                const auto& ids = sheet == 0 ? node_id : node_bottom;
                const int c = static_cast<int>(pts.size());
                pts.push_back({(ci + 0.5) * d, (cj + 0.5) * d, static_cast<double>(sheet)});
                const int v00 = ids[nid(ci, cj)], v10 = ids[nid(ci + 1, cj)];
                const int v11 = ids[nid(ci + 1, cj + 1)], v01 = ids[nid(ci, cj + 1)];
                const std::array<std::array<int, 2>, 4> sides{{{v00, v10}, {v10, v11}, {v11, v01}, {v01, v00}}};
                for (const auto& sd : sides) {
                    if (sheet == 0)
                        tris.push_back({c, sd[0], sd[1]});
                    else
                        tris.push_back({c, sd[1], sd[0]});
                }
            }
    return IntrinsicMesh::build(std::move(pts), std::move(tris), {}, Chart::doubled());
}

}  // namespace nodal_lab
