#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "nodal_lab/builders.hpp"
#include "nodal_lab/mesh_io.hpp"
#include "nodal_lab/polygon.hpp"

using namespace nodal_lab;

namespace {

void expect_invariants(const IntrinsicMesh& m) {
    for (int t = 0; t < m.triangle_count(); ++t) {
        const auto l = m.side_lengths(t);
        for (int k = 0; k < 3; ++k) EXPECT_LT(l[k], l[(k + 1) % 3] + l[(k + 2) % 3]);
        EXPECT_GT(m.triangle_area(t), 0.0);
    }
}

}  // namespace

TEST(Rectangle, UnitSquareSingleCell) {
    auto m = build_rectangle(1, 1, 1);
    EXPECT_EQ(m.vertex_count(), 4);
    EXPECT_EQ(m.triangle_count(), 2);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
    ASSERT_EQ(m.boundary_loops.size(), 1u);
    EXPECT_EQ(m.boundary_loops[0].size(), 4u);
}

TEST(Rectangle, AreaAndEdgeBound) {
    for (double h : {0.3, 0.1, 1.0 / 16}) {
        auto m = build_rectangle(2, 1, h);
        EXPECT_NEAR(m.total_area(), 2.0, 1e-12);
        EXPECT_LE(m.quality().max_edge, 1.5 * h);
        EXPECT_GE(m.quality().min_angle, 20.0 * std::numbers::pi / 180.0);
        expect_invariants(m);
    }
}

TEST(Rectangle, UnderResolvedRejected) {
    EXPECT_THROW(build_rectangle(1, 0.5, 0.6), Error);
    EXPECT_THROW(build_rectangle(-1, 1, 0.1), Error);
}

TEST(Sphere, IcosahedronCounts) {
    auto m = build_sphere(0);
    EXPECT_EQ(m.vertex_count(), 12);
    EXPECT_EQ(m.triangle_count(), 20);
    EXPECT_EQ(m.edge_count(), 30);
    EXPECT_TRUE(m.closed());
}

TEST(Sphere, EulerCharacteristicEveryLevel) {
    for (int s = 0; s <= 4; ++s) {
        auto m = build_sphere(s);
        EXPECT_EQ(m.euler_characteristic(), 2) << "level " << s;
        EXPECT_TRUE(m.closed());
    }
    // area converges to 4 pi from below
    EXPECT_NEAR(build_sphere(5).total_area(), 4 * std::numbers::pi, 0.01);
}

TEST(GenusSurface, EulerCharacteristic) {
    for (int g = 1; g <= 3; ++g) {
        auto m = build_genus_surface(g, 0.5);
        EXPECT_EQ(m.euler_characteristic(), 2 - 2 * g);
        EXPECT_TRUE(m.closed());
        expect_invariants(m);
    }
}

TEST(FlatTorus, EulerCharacteristicZero) {
    auto m = build_flat_torus(2 * std::numbers::pi, 0.5);
    EXPECT_EQ(m.euler_characteristic(), 0);
    EXPECT_NEAR(m.total_area(), 4 * std::numbers::pi * std::numbers::pi, 1e-9);
}

TEST(Disk, AreaApproachesPi) {
    auto m = build_disk(1.0, 0.05);
    EXPECT_NEAR(m.total_area(), std::numbers::pi, 0.01);
    ASSERT_EQ(m.boundary_loops.size(), 1u);
    expect_invariants(m);
    auto m2 = build_disk(1.0, 0.2, 32);
    EXPECT_EQ(m2.boundary_loops[0].size(), 32u);
}

TEST(ImeshFormat, RoundTripIsExact) {
    auto m = build_sphere(2);
    std::stringstream ss;
    write_imesh(ss, m);
    auto r = read_imesh(ss);
    ASSERT_EQ(r.vertex_count(), m.vertex_count());
    ASSERT_EQ(r.edge_count(), m.edge_count());
    for (int e = 0; e < m.edge_count(); ++e) {
        const auto [a, b] = m.edges[e];
        EXPECT_EQ(r.length(a, b), m.lengths[e]);
    }
    EXPECT_EQ(r.triangles, m.triangles);
}

TEST(ImeshFormat, HeaderIsChecked) {
    std::stringstream ss("IMESH v2\n0 0 0\n");
    EXPECT_THROW(read_imesh(ss), Error);
}

TEST(Validation, NonManifoldEdgeRejected) {
    std::vector<Point> p{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {1, 1, 0}};
    std::vector<Tri> t{{0, 1, 2}, {1, 0, 3}, {0, 1, 4}};
    EXPECT_THROW(IntrinsicMesh::build(p, t, {}, Chart::planar()), Error);
}

TEST(Validation, InconsistentOrientationRejected) {
    std::vector<Point> p{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    std::vector<Tri> t{{0, 1, 2}, {0, 1, 3}};
    EXPECT_THROW(IntrinsicMesh::build(p, t, {}, Chart::planar()), Error);
}

TEST(Validation, TriangleInequalityEnforcedOnIntrinsicLengths) {
    std::vector<Point> p(3, Point{0, 0, 0});
    std::vector<Tri> t{{0, 1, 2}};
    EXPECT_THROW(IntrinsicMesh::build(p, t, {}, Chart{}, [](int a, int b) { return a + b == 3 ? 3.0 : 1.0; }),
                 Error);
}

TEST(Polygon, ConvexQuadrilateralHasOneLoop) {
    auto m = build_polygon({{0, 0}, {2, 0}, {2.5, 1.5}, {-0.3, 1.2}}, 0.2);
    EXPECT_EQ(m.boundary_loops.size(), 1u);
    EXPECT_EQ(m.euler_characteristic(), 1);
    expect_invariants(m);
}

TEST(Polygon, CoarseTriangleIsItself) {
    auto m = build_polygon({{0, 0}, {1, 0}, {0, 1}}, 100.0);
    EXPECT_EQ(m.vertex_count(), 3);
    EXPECT_EQ(m.triangle_count(), 1);
}

TEST(Polygon, LShapeAreaExact) {
    // clockwise input is accepted and reoriented
    std::vector<Point2> l{{0, 0}, {0, 2}, {1, 2}, {1, 1}, {2, 1}, {2, 0}};
    for (double h : {0.5, 0.1, 0.05}) {
        auto m = build_polygon(l, h);
        EXPECT_NEAR(m.total_area(), 3.0, 1e-10);
        EXPECT_EQ(m.boundary_loops.size(), 1u);
        EXPECT_LE(m.quality().max_edge, 1.5 * h);
        EXPECT_GE(m.quality().min_angle, 20.0 * std::numbers::pi / 180.0) << "h = " << h;
    }
}

TEST(Polygon, SelfIntersectionRejected) {
    EXPECT_THROW(build_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, 0.1), Error);
}
