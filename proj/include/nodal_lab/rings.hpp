#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "nodal_lab/mesh.hpp"

namespace nodal_lab::detail {

/// A vertex on a ring (or chain) around a center, with its polar angle.
struct RingNode {
    int vertex;
    double angle;
    double radius = 0.0;  // optional; enables the quality-driven choice of diagonals
};

/// Smallest corner angle of the planar triangle (a, b, c) given in polar form; negative if clockwise.
inline double polar_min_angle(const RingNode& a, const RingNode& b, const RingNode& c) {
    const double p[3][2] = {{a.radius * std::cos(a.angle), a.radius * std::sin(a.angle)},
                            {b.radius * std::cos(b.angle), b.radius * std::sin(b.angle)},
                            {c.radius * std::cos(c.angle), c.radius * std::sin(c.angle)}};
    const double area = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
    if (area <= 0.0) return -1.0;
    double worst = std::numbers::pi;
    for (int k = 0; k < 3; ++k) {
        const double* o = p[k];
        const double* u = p[(k + 1) % 3];
        const double* v = p[(k + 2) % 3];
        const double ux = u[0] - o[0], uy = u[1] - o[1], vx = v[0] - o[0], vy = v[1] - o[1];
        worst = std::min(worst, std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy));
    }
    return worst;
}

/// Advance along the inner chain (true) or the outer chain (false)?
/// By angle order unless radii are known; then the shorter diagonal wins among orientation-valid choices.
inline bool advance_inner_step(const RingNode& i0, const RingNode& i1, const RingNode& o0, const RingNode& o1,
                               double ia1, double oa1) {
    const bool by_angle = ia1 < oa1;
    if (i0.radius <= 0.0 || o0.radius <= 0.0) return by_angle;
    const bool inner_ok = polar_min_angle(i0, o0, i1) > 0.0;
    const bool outer_ok = polar_min_angle(i0, o0, o1) > 0.0;
    if (inner_ok != outer_ok) return inner_ok;
    if (!inner_ok) return by_angle;
    auto dist2 = [](const RingNode& a, const RingNode& b) {
        return a.radius * a.radius + b.radius * b.radius - 2.0 * a.radius * b.radius * std::cos(a.angle - b.angle);
    };
    return dist2(i1, o0) < dist2(i0, o1);
}

inline double unwrap_from(double a, double start) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    while (a < start) a += two_pi;
    while (a >= start + two_pi) a -= two_pi;
    return a;
}

/// Triangulates the strip between an inner and an outer closed ring, both ordered by increasing angle.
/// Emits triangles that are counter-clockwise in the polar chart.
inline void zip_closed(std::vector<RingNode> inner, std::vector<RingNode> outer, std::vector<Tri>& out) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const std::size_t n = inner.size(), m = outer.size();
    const double start = inner[0].angle - std::numbers::pi / static_cast<double>(m);
    // rotate outer so it starts just after `start`
    std::size_t first = 0;
    double best = 1e300;
    for (std::size_t j = 0; j < m; ++j) {
        const double a = unwrap_from(outer[j].angle, start);
        if (a < best) best = a, first = j;
    }
    std::vector<double> ia(n + 1), oa(m + 1);
    std::vector<int> iv(n + 1), ov(m + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        iv[i] = inner[i % n].vertex;
        ia[i] = unwrap_from(inner[i % n].angle, start) + (i == n ? two_pi : 0.0);
    }
    for (std::size_t j = 0; j <= m; ++j) {
        ov[j] = outer[(first + j) % m].vertex;
        oa[j] = unwrap_from(outer[(first + j) % m].angle, start) + (j == m ? two_pi : 0.0);
    }
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        bool advance_inner = j == m;
        if (!advance_inner && i < n) {
            RingNode a = inner[i % n], b = inner[(i + 1) % n], c = outer[(first + j) % m], d = outer[(first + j + 1) % m];
            a.angle = ia[i], b.angle = ia[i + 1], c.angle = oa[j], d.angle = oa[j + 1];
            advance_inner = advance_inner_step(a, b, c, d, ia[i + 1], oa[j + 1]);
        }
        if (advance_inner) {
            out.push_back({iv[i], ov[j], iv[i + 1]});
            ++i;
        } else {
            out.push_back({iv[i], ov[j], ov[j + 1]});
            ++j;
        }
    }
}

/// Open variant: both chains run from a common start ray to a common end ray (angles increasing).
inline void zip_open(const std::vector<RingNode>& inner, const std::vector<RingNode>& outer, std::vector<Tri>& out) {
    const std::size_t n = inner.size() - 1, m = outer.size() - 1;
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        const bool advance_inner =
            j == m || (i < n && advance_inner_step(inner[i], inner[i + 1], outer[j], outer[j + 1], inner[i + 1].angle,
                                                   outer[j + 1].angle));
        if (advance_inner) {
            out.push_back({inner[i].vertex, outer[j].vertex, inner[i + 1].vertex});
            ++i;
        } else {
            out.push_back({inner[i].vertex, outer[j].vertex, outer[j + 1].vertex});
            ++j;
        }
    }
}

}  // namespace nodal_lab::detail
