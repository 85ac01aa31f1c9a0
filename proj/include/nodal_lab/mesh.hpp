#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nodal_lab/error.hpp"

namespace nodal_lab {

using Point = std::array<double, 3>;
using Tri = std::array<int, 3>;
using EdgeKey = std::array<int, 2>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline Point cross(const Point& a, const Point& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

enum class Region : std::uint8_t { m1_bulk, m1_collar, m2, neck, omega1, omega2 };

inline std::string_view to_string(Region r) {
    switch (r) {
        case Region::m1_bulk: return "M1_BULK";
        case Region::m1_collar: return "M1_COLLAR";
        case Region::m2: return "M2";
        case Region::neck: return "NECK";
        case Region::omega1: return "OMEGA1";
        case Region::omega2: return "OMEGA2";
    }
    return "?";
}

inline Region parse_region(std::string_view s) {
    for (auto r : {Region::m1_bulk, Region::m1_collar, Region::m2, Region::neck, Region::omega1, Region::omega2})
        if (to_string(r) == s) return r;
    fail(ErrorKind::io, "unknown region tag '" + std::string(s) + "'");
}

/// How vertex coordinates (if any) relate to the metric.
///  planar   - (x, y, 0) in the Euclidean plane
///  star     - points on a star-shaped closed surface around the origin (sphere, ellipsoid);
///             edge lengths are chords
///  periodic - (x, y) in the flat torus [0,px) x [0,py)
///  doubled  - two copies of a planar domain glued along their boundary; z holds the sheet (0 or 1)
///  none     - coordinates are decorative only; the metric lives in the edge lengths
struct Chart {
    enum class Kind { none, planar, star, periodic, doubled } kind = Kind::none;
    double period_x = 0.0;
    double period_y = 0.0;
    Point axes{1.0, 1.0, 1.0};  // star: ellipsoid semi-axes

    static Chart planar() { return {Kind::planar}; }
    static Chart periodic(double px, double py) { return {Kind::periodic, px, py}; }
    static Chart star(Point axes = {1.0, 1.0, 1.0}) { return {Kind::star, 0.0, 0.0, axes}; }
    static Chart doubled() { return {Kind::doubled}; }

    double wrap_delta(double d, double period) const {
        if (period <= 0.0) return d;
        d = std::fmod(d, period);
        if (d > 0.5 * period) d -= period;
        if (d < -0.5 * period) d += period;
        return d;
    }

    /// Displacement b - a as seen by the metric.
    Point delta(const Point& a, const Point& b) const {
        switch (kind) {
            case Kind::periodic:
                return {wrap_delta(b[0] - a[0], period_x), wrap_delta(b[1] - a[1], period_y), 0.0};
            case Kind::doubled:
            case Kind::planar: return {b[0] - a[0], b[1] - a[1], 0.0};
            default: return b - a;
        }
    }

    double distance(const Point& a, const Point& b) const { return norm(delta(a, b)); }
};

/// Heron's formula in the numerically stable (Kahan) ordering. Returns 0 for degenerate input.
inline double heron_area(double a, double b, double c) {
    std::array<double, 3> s{a, b, c};
    std::sort(s.begin(), s.end(), std::greater<>());
    const double x = s[0], y = s[1], z = s[2];
    const double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
}

inline std::uint64_t edge_hash(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct MeshQuality {
    double min_angle = 0.0;  // radians
    double max_edge = 0.0;
    std::vector<std::pair<Region, double>> h_max;  // max edge per region present
};

/// Triangle mesh whose metric is given by per-edge lengths.
///
/// Edge k of triangle t (tri_edges[t][k]) is the edge opposite local vertex k.
/// Meshes are built once through `IntrinsicMesh::build` and treated as immutable afterwards.
class IntrinsicMesh {
public:
    using LengthFn = std::function<double(int, int)>;

    std::vector<Point> points;
    Chart chart;
    std::vector<Tri> triangles;
    std::vector<Region> regions;
    std::vector<EdgeKey> edges;
    std::vector<double> lengths;
    std::vector<std::array<int, 3>> tri_edges;
    std::vector<std::array<int, 2>> edge_tris;
    std::vector<std::vector<int>> boundary_loops;

    /// Builds connectivity, edge lengths and boundary loops, then validates every invariant.
    /// With no length function the lengths come from `chart` applied to `points`.
    static IntrinsicMesh build(std::vector<Point> pts, std::vector<Tri> tris, std::vector<Region> regs, Chart chart,
                               const LengthFn& length = {}) {
        IntrinsicMesh m;
        m.points = std::move(pts);
        m.triangles = std::move(tris);
        m.regions = std::move(regs);
        m.chart = chart;
        if (m.regions.empty()) m.regions.assign(m.triangles.size(), Region::omega1);
        require(m.regions.size() == m.triangles.size(), "region tag count must match triangle count");
        m.build_edges();
        m.lengths.resize(m.edges.size());
        for (std::size_t e = 0; e < m.edges.size(); ++e) {
            const auto [a, b] = m.edges[e];
            if (length) {
                m.lengths[e] = length(a, b);
            } else {
                require(chart.kind != Chart::Kind::none, "mesh without chart needs explicit edge lengths");
                m.lengths[e] = chart.distance(m.points[a], m.points[b]);
            }
        }
        m.build_boundary_loops();
        m.validate();
        return m;
    }

    int vertex_count() const { return static_cast<int>(points.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    bool closed() const { return boundary_loops.empty(); }

    int euler_characteristic() const { return vertex_count() - edge_count() + triangle_count(); }

    std::optional<int> find_edge(int a, int b) const {
        auto it = edge_index_.find(edge_hash(a, b));
        if (it == edge_index_.end()) return std::nullopt;
        return it->second;
    }

    double length(int a, int b) const {
        auto e = find_edge(a, b);
        require(e.has_value(), "no edge between the given vertices");
        return lengths[*e];
    }

    /// Side lengths of triangle t, entry k opposite local vertex k.
    std::array<double, 3> side_lengths(int t) const {
        const auto& te = tri_edges[t];
        return {lengths[te[0]], lengths[te[1]], lengths[te[2]]};
    }

    double triangle_area(int t) const {
        const auto l = side_lengths(t);
        return heron_area(l[0], l[1], l[2]);
    }

    double total_area() const {
        double a = 0.0;
        for (int t = 0; t < triangle_count(); ++t) a += triangle_area(t);
        return a;
    }

    double area_of(Region r) const {
        double a = 0.0;
        for (int t = 0; t < triangle_count(); ++t)
            if (regions[t] == r) a += triangle_area(t);
        return a;
    }

    std::vector<char> boundary_mask() const {
        std::vector<char> mask(points.size(), 0);
        for (const auto& loop : boundary_loops)
            for (int v : loop) mask[v] = 1;
        return mask;
    }

    /// Corner angle of triangle t at local vertex k (law of cosines).
    double corner_angle(int t, int k) const {
        const auto l = side_lengths(t);
        const double a = l[k], b = l[(k + 1) % 3], c = l[(k + 2) % 3];
        const double cosv = std::clamp((b * b + c * c - a * a) / (2.0 * b * c), -1.0, 1.0);
        return std::acos(cosv);
    }

    MeshQuality quality() const {
        MeshQuality q;
        q.min_angle = std::numbers::pi;
        for (int t = 0; t < triangle_count(); ++t) {
            for (int k = 0; k < 3; ++k) q.min_angle = std::min(q.min_angle, corner_angle(t, k));
            for (int k = 0; k < 3; ++k) {
                const double l = lengths[tri_edges[t][k]];
                q.max_edge = std::max(q.max_edge, l);
                auto it = std::find_if(q.h_max.begin(), q.h_max.end(),
                                       [&](const auto& p) { return p.first == regions[t]; });
                if (it == q.h_max.end())
                    q.h_max.emplace_back(regions[t], l);
                else
                    it->second = std::max(it->second, l);
            }
        }
        return q;
    }

    /// Vertex -> incident triangles.
    std::vector<std::vector<int>> vertex_triangles() const {
        std::vector<std::vector<int>> vt(points.size());
        for (int t = 0; t < triangle_count(); ++t)
            for (int v : triangles[t]) vt[v].push_back(t);
        return vt;
    }

    /// Vertex -> (neighbor, edge) pairs.
    std::vector<std::vector<std::pair<int, int>>> vertex_neighbors() const {
        std::vector<std::vector<std::pair<int, int>>> nb(points.size());
        for (int e = 0; e < edge_count(); ++e) {
            nb[edges[e][0]].emplace_back(edges[e][1], e);
            nb[edges[e][1]].emplace_back(edges[e][0], e);
        }
        return nb;
    }

    /// Checks triangle inequality, positive Heron area, edge-manifoldness, consistent orientation and
    /// simple boundary loops. Throws ErrorKind::geometry on the first violation.
    void validate() const {
        for (int t = 0; t < triangle_count(); ++t) {
            const auto& tr = triangles[t];
            if (tr[0] == tr[1] || tr[1] == tr[2] || tr[0] == tr[2])
                fail(ErrorKind::geometry, "triangle " + std::to_string(t) + " repeats a vertex");
            const auto l = side_lengths(t);
            for (int k = 0; k < 3; ++k) {
                if (!(l[k] > 0.0) || !(l[k] < l[(k + 1) % 3] + l[(k + 2) % 3]))
                    fail(ErrorKind::geometry, "triangle inequality violated in triangle " + std::to_string(t));
            }
            if (!(triangle_area(t) > 0.0)) fail(ErrorKind::geometry, "zero area triangle " + std::to_string(t));
        }
        // Each interior edge must be traversed once in each direction.
        for (int e = 0; e < edge_count(); ++e) {
            if (edge_tris[e][1] < 0) continue;
            const auto [a, b] = edges[e];
            const bool d0 = traverses(edge_tris[e][0], a, b);
            const bool d1 = traverses(edge_tris[e][1], a, b);
            if (d0 == d1) fail(ErrorKind::geometry, "inconsistent orientation across edge " + std::to_string(e));
        }
    }

    /// True if triangle t contains the directed half-edge a -> b.
    bool traverses(int t, int a, int b) const {
        const auto& tr = triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tr[k] == a && tr[(k + 1) % 3] == b) return true;
        return false;
    }

private:
    std::unordered_map<std::uint64_t, int> edge_index_;

    void build_edges() {
        edge_index_.clear();
        edges.clear();
        edge_tris.clear();
        tri_edges.assign(triangles.size(), {-1, -1, -1});
        for (int t = 0; t < triangle_count(); ++t) {
            const auto& tr = triangles[t];
            for (int k = 0; k < 3; ++k) {
                require(tr[k] >= 0 && tr[k] < vertex_count(), "triangle references a missing vertex");
                int a = tr[(k + 1) % 3], b = tr[(k + 2) % 3];
                const auto h = edge_hash(a, b);
                auto [it, inserted] = edge_index_.try_emplace(h, static_cast<int>(edges.size()));
                if (inserted) {
                    edges.push_back({std::min(a, b), std::max(a, b)});
                    edge_tris.push_back({t, -1});
                } else {
                    auto& et = edge_tris[it->second];
                    if (et[1] >= 0)
                        fail(ErrorKind::geometry, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                      ") borders more than two triangles");
                    et[1] = t;
                }
                tri_edges[t][k] = it->second;
            }
        }
    }

    void build_boundary_loops() {
        boundary_loops.clear();
        std::vector<int> next(points.size(), -1);
        for (int e = 0; e < edge_count(); ++e) {
            if (edge_tris[e][1] >= 0) continue;
            const int t = edge_tris[e][0];
            auto [a, b] = edges[e];
            if (!traverses(t, a, b)) std::swap(a, b);
            if (next[a] >= 0) fail(ErrorKind::geometry, "boundary is not a union of simple loops");
            next[a] = b;
        }
        std::vector<char> seen(points.size(), 0);
        for (int s = 0; s < vertex_count(); ++s) {
            if (next[s] < 0 || seen[s]) continue;
            std::vector<int> loop;
            int v = s;
            while (!seen[v]) {
                seen[v] = 1;
                loop.push_back(v);
                v = next[v];
                if (v < 0) fail(ErrorKind::geometry, "open boundary chain");
            }
            if (v != s) fail(ErrorKind::geometry, "boundary loop is not simple");
            boundary_loops.push_back(std::move(loop));
        }
    }
};

}  // namespace nodal_lab
