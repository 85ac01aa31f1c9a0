#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "nodal_lab/builders.hpp"
#include "nodal_lab/geodesic.hpp"
#include "nodal_lab/patch.hpp"

using namespace nodal_lab;
using std::numbers::pi;

namespace {

int nearest_vertex(const IntrinsicMesh& m, Point p) {
    int best = 0;
    for (int v = 1; v < m.vertex_count(); ++v)
        if (m.chart.distance(m.points[v], p) < m.chart.distance(m.points[best], p)) best = v;
    return best;
}

}  // namespace

TEST(Geodesic, PlanarDistancesMatchEuclidean) {
    auto m = build_rectangle(1, 1, 1.0 / 32);
    const int c = nearest_vertex(m, {0.5, 0.5, 0});
    const auto d = geodesic_distance(m, c);
    double worst = 0.0;
    for (int v = 0; v < m.vertex_count(); ++v) {
        const double exact = m.chart.distance(m.points[c], m.points[v]);
        worst = std::max(worst, std::abs(d[v] - exact));
    }
    EXPECT_LT(worst, 1.5 / 32);  // point sources carry an O(h) error under plane-front updates
}

TEST(Geodesic, SpherePoleToPole) {
    auto m = build_sphere(4);
    const int north = nearest_vertex(m, {0, 0, 1});
    const int south = nearest_vertex(m, {0, 0, -1});
    const auto d = geodesic_distance(m, north);
    const double exact = std::acos(std::clamp(dot(m.points[north], m.points[south]), -1.0, 1.0));
    EXPECT_NEAR(d[south], exact, 0.03 * exact);
}

TEST(Geodesic, UnfoldingBeatsEdgePaths) {
    // a front along edge ab reaches the apex of the equilateral triangle at its height
    EXPECT_NEAR(detail::unfold_update(0.0, 0.0, 1.0, 1.0, 1.0), std::sqrt(3.0) / 2, 1e-12);
    // oblique plane front: values of x cos(t) + y sin(t) are reproduced exactly
    const double t = 1.2, cx = 0.4, cy = 0.9;
    EXPECT_NEAR(detail::unfold_update(0.0, std::cos(t), 1.0, std::hypot(cx, cy), std::hypot(1 - cx, cy)),
                cx * std::cos(t) + cy * std::sin(t), 1e-12);
    EXPECT_NEAR(detail::unfold_update(0.0, 1.0, 1.0, 1.0, std::sqrt(2.0)), 1.0, 1e-12);
}

TEST(RemoveBall, SphereRemovedAreaMatchesSmallBall) {
    for (double r : {0.3, 0.2}) {
        auto s = build_sphere(4);
        const int c = nearest_vertex(s, {0, 0, 1});
        auto holed = remove_geodesic_ball(s, c, r);
        const double removed = s.total_area() - holed.total_area();
        EXPECT_NEAR(removed, pi * r * r, 0.05 * pi * r * r) << "r = " << r;
        EXPECT_EQ(holed.euler_characteristic(), 1);
        ASSERT_EQ(holed.boundary_loops.size(), 1u);
        EXPECT_EQ(holed.boundary_loops[0].size(), 32u);
    }
}

TEST(RemoveBall, LoopDistanceToCenterIsRadius) {
    auto s = build_sphere(4);
    const int c = nearest_vertex(s, {0, 0, 1});
    const Point pole = s.points[c];
    const double r = 0.25;
    auto holed = remove_geodesic_ball(s, c, r);
    for (int v : holed.boundary_loops[0]) {
        const double d = std::acos(std::clamp(dot(holed.points[v], pole), -1.0, 1.0));
        EXPECT_NEAR(d, r, 1e-9);
    }
}

TEST(RemoveBall, BoundaryCenterGivesHalfCircle) {
    auto sq = build_rectangle(1, 1, 1.0 / 20);
    const int c = nearest_vertex(sq, {0.5, 0, 0});
    auto holed = remove_geodesic_ball(sq, c, 0.1);
    ASSERT_EQ(holed.boundary_loops.size(), 1u);
    int on_arc = 0;
    for (int v : holed.boundary_loops[0]) {
        const auto& p = holed.points[v];
        EXPECT_GE(p[1], -1e-15);
        if (std::abs(std::hypot(p[0] - 0.5, p[1]) - 0.1) < 1e-12) ++on_arc;
    }
    EXPECT_EQ(on_arc, 17);  // half of 32 segments
    // inscribed half 32-gon
    const double half_polygon = 0.5 * 32 * 0.5 * 0.01 * std::sin(2 * pi / 32);
    EXPECT_NEAR(holed.total_area(), 1.0 - half_polygon, 1e-12);
}

TEST(RemoveBall, WrappingBallRejected) {
    auto s = build_sphere(3);
    EXPECT_THROW(remove_geodesic_ball(s, 0, 2.5), Error);
}

TEST(PolarPatch, FilledPatchConservesPlanarArea) {
    auto sq = build_rectangle(1, 1, 1.0 / 16);
    PatchSpec spec{0.3, 0.0, 0.02, 32, 0.1};
    auto res = polar_patch(sq, {0.5, 0.5, 0}, spec);
    EXPECT_NEAR(res.mesh.total_area(), 1.0, 1e-12);
    EXPECT_EQ(res.mesh.euler_characteristic(), 1);
    EXPECT_GE(res.mesh.quality().min_angle, 20.0 * pi / 180);
}

TEST(PolarPatch, HoleMeshIsSubmeshOfFilledMesh) {
    auto sq = build_rectangle(1, 1, 1.0 / 16);
    const double r = 0.1 * std::pow(2.0, -1.0);
    auto filled = polar_patch(sq, {0.5, 0.5, 0}, {0.3, 0.0, r, 32, 0.1}).mesh;
    auto holed = polar_patch(sq, {0.5, 0.5, 0}, {0.3, r, 0.0, 32, 0.1}).mesh;
    // every triangle of the holed mesh appears (by coordinates) in the filled mesh
    std::set<std::array<long long, 6>> keys;
    auto key = [](const IntrinsicMesh& m, int t) {
        std::array<std::pair<long long, long long>, 3> v;
        for (int k = 0; k < 3; ++k)
            v[k] = {std::llround(m.points[m.triangles[t][k]][0] * 1e9), std::llround(m.points[m.triangles[t][k]][1] * 1e9)};
        std::sort(v.begin(), v.end());
        return std::array<long long, 6>{v[0].first, v[0].second, v[1].first, v[1].second, v[2].first, v[2].second};
    };
    for (int t = 0; t < filled.triangle_count(); ++t) keys.insert(key(filled, t));
    for (int t = 0; t < holed.triangle_count(); ++t) EXPECT_TRUE(keys.count(key(holed, t)));
    EXPECT_LT(holed.triangle_count(), filled.triangle_count());
}

TEST(RefineNear, UnchangedAtMeshSize) {
    auto sq = build_rectangle(1, 1, 0.1);
    auto r = refine_near(sq, {0.5, 0.5, 0}, 0.3, 0.1);
    EXPECT_EQ(r.triangle_count(), sq.triangle_count());
}

TEST(RefineNear, HalvedSizeBoundsEdgesAndConservesArea) {
    const double h = 0.1;
    auto sq = build_rectangle(1, 1, h);
    auto r = refine_near(sq, {0.5, 0.5, 0}, 0.25, h / 2);
    EXPECT_GT(r.triangle_count(), sq.triangle_count());
    EXPECT_NEAR(r.total_area(), 1.0, 1e-12);
    for (int t = 0; t < r.triangle_count(); ++t) {
        bool near = false;
        for (int v : r.triangles[t]) near |= std::hypot(r.points[v][0] - 0.5, r.points[v][1] - 0.5) < 0.25;
        if (!near) continue;
        for (double l : r.side_lengths(t)) EXPECT_LE(l, 0.75 * h + 1e-12);
    }
    EXPECT_GE(r.quality().min_angle, 20.0 * pi / 180);
}

TEST(RefineNear, SphereStaysOnSurface) {
    auto s = build_sphere(2);
    auto r = refine_near(s, {0, 0, 1}, 0.5, 0.1);
    EXPECT_EQ(r.euler_characteristic(), 2);
    for (const auto& p : r.points) EXPECT_NEAR(norm(p), 1.0, 1e-12);
}
