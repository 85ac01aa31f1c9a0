#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "nodal_lab/mesh.hpp"

namespace nodal_lab {

struct DistanceSeed {
    int vertex;
    double distance;
};

namespace detail {

/// Planar position of the apex c of triangle (a, b, c) with a at the origin and b on the +x axis.
inline std::array<double, 2> unfold_apex(double ab, double ac, double bc) {
    const double x = (ac * ac - bc * bc + ab * ab) / (2.0 * ab);
    const double y = std::sqrt(std::max(0.0, ac * ac - x * x));
    return {x, y};
}

/// Arrival value at c from a plane front consistent with the known values da, db (linear interpolant
/// with unit gradient). Falls back to the two edge paths when the characteristic through c misses the edge.
inline double unfold_update(double da, double db, double ab, double ac, double bc) {
    const double best = std::min(da + ac, db + bc);
    const double gx = (db - da) / ab;
    if (gx * gx >= 1.0) return best;
    const auto c = unfold_apex(ab, ac, bc);
    if (c[1] <= 0.0) return best;
    const double gy = std::sqrt(1.0 - gx * gx);
    const double foot = c[0] - gx * c[1] / gy;  // where the characteristic through c meets the edge
    if (foot < 0.0 || foot > ab) return best;
    return std::min(best, da + gx * c[0] + gy * c[1]);
}

}  // namespace detail

/// Approximate geodesic distance from the seeds: Dijkstra ordering over edges, refined by
/// a plane-front update in each triangle whose two other vertices are already final.
inline std::vector<double> geodesic_distance(const IntrinsicMesh& mesh, const std::vector<DistanceSeed>& seeds) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int n = mesh.vertex_count();
    std::vector<double> dist(n, inf);
    std::vector<char> done(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (const auto& s : seeds) {
        if (s.distance < dist[s.vertex]) {
            dist[s.vertex] = s.distance;
            heap.emplace(s.distance, s.vertex);
        }
    }
    const auto nb = mesh.vertex_neighbors();
    const auto vt = mesh.vertex_triangles();
    auto relax = [&](int v, double d) {
        if (d < dist[v]) {
            dist[v] = d;
            heap.emplace(d, v);
        }
    };
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (done[v] || d > dist[v]) continue;
        done[v] = 1;
        for (const auto& [w, e] : nb[v])
            if (!done[w]) relax(w, d + mesh.lengths[e]);
        for (int t : vt[v]) {
            const auto& tr = mesh.triangles[t];
            for (int k = 0; k < 3; ++k) {
                const int a = tr[k], b = tr[(k + 1) % 3], c = tr[(k + 2) % 3];
                if (!(a == v || b == v) || done[c] || !done[a] || !done[b]) continue;
                const auto l = mesh.side_lengths(t);  // l[j] opposite local vertex j
                const double ab = l[(k + 2) % 3], bc = l[k], ac = l[(k + 1) % 3];
                relax(c, detail::unfold_update(dist[a], dist[b], ab, ac, bc));
            }
        }
    }
    return dist;
}

inline std::vector<double> geodesic_distance(const IntrinsicMesh& mesh, int source) {
    return geodesic_distance(mesh, {{source, 0.0}});
}

}  // namespace nodal_lab
