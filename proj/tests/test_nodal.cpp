#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "nodal_lab/builders.hpp"
#include "nodal_lab/nodal.hpp"
#include "nodal_lab/spectrum.hpp"

using namespace nodal_lab;
using std::numbers::pi;

namespace {

template <class F>
Vector sample(const IntrinsicMesh& m, F f) {
    Vector u(m.vertex_count());
    for (int v = 0; v < m.vertex_count(); ++v) u[v] = f(m.points[v][0], m.points[v][1], m.points[v][2]);
    return u;
}

NodalSet segment_set(Point a, Point b) {
    NodalSet s;
    s.segments.push_back({0, 0, 0, a, b, Region::omega1});
    s.component = {0};
    s.component_count = 1;
    return s;
}

/// Unit-square-like mesh whose triangles left of x = 1 are bulk and right of it are tagged `outside`.
IntrinsicMesh tagged_strip(Region outside) {
    auto m = build_rectangle(2, 1, 1.0 / 16);
    std::vector<Region> regs;
    for (int t = 0; t < m.triangle_count(); ++t) {
        double cx = 0;
        for (int v : m.triangles[t]) cx += m.points[v][0] / 3;
        regs.push_back(cx < 1.0 ? Region::m1_bulk : outside);
    }
    return IntrinsicMesh::build(m.points, m.triangles, regs, Chart::planar());
}

}  // namespace

TEST(LevelSet, ConstantHasEmptyNodalSet) {
    auto m = build_rectangle(1, 1, 0.1);
    EXPECT_TRUE(extract_level_set(m, Vector::Ones(m.vertex_count()), 0.0).empty());
}

TEST(LevelSet, LinearFunctionReproduced) {
    const double h = 1.0 / 16;
    auto m = build_rectangle(1, 1, h);
    auto set = extract_level_set(m, sample(m, [](double x, double, double) { return x - 0.5; }));
    EXPECT_EQ(set.component_count, 1);
    EXPECT_LE(hausdorff(set, segment_set({0.5, 0, 0}, {0.5, 1, 0}), h / 4), h);
    for (const auto& s : set.segments) {
        EXPECT_NEAR(s.a[0], 0.5, 1e-12);
        EXPECT_NEAR(s.b[0], 0.5, 1e-12);
    }
}

TEST(LevelSet, SharedCrossingsAreBitwiseEqual) {
    auto m = build_sphere(3);
    auto set = extract_level_set(m, sample(m, [](double x, double y, double z) { return x * y + 0.3 * z; }));
    std::map<int, Point> seen;
    for (const auto& s : set.segments)
        for (auto [e, p] : {std::pair{s.edge_a, s.a}, std::pair{s.edge_b, s.b}}) {
            auto [it, fresh] = seen.emplace(e, p);
            if (!fresh) EXPECT_EQ(it->second, p);
        }
}

TEST(LevelSet, LevelEqualsShiftedZeroSet) {
    auto m = build_rectangle(1, 1, 1.0 / 20);
    const Vector u = sample(m, [](double x, double y, double) { return std::sin(3 * x) * std::cos(2 * y); });
    const double alpha = 0.17;
    auto a = extract_level_set(m, u, alpha);
    auto b = extract_level_set(m, (u.array() - alpha).matrix(), 0.0);
    ASSERT_EQ(a.segments.size(), b.segments.size());
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
        EXPECT_EQ(a.segments[i].a, b.segments[i].a);
        EXPECT_EQ(a.segments[i].b, b.segments[i].b);
    }
}

TEST(LevelSet, RectangleSecondModeIsMidline) {
    const double h = 1.0 / 32;
    auto m = build_rectangle(2, 1, h);
    auto op = assemble(m, BoundaryCondition::dirichlet);
    auto s = solve_lowest(op, 2);
    const Vector u = lift_dirichlet_boundary(m, s.vector(1));
    auto set = extract_level_set(m, u);
    EXPECT_LE(hausdorff(set, segment_set({1, 0, 0}, {1, 1, 0}), h / 4), h);
    EXPECT_EQ(count_domains(m, u).count, 2);
    EXPECT_TRUE(payne_check(m, set, 2 * h).touches);
}

TEST(Domains, GroundStateAndSecondMode) {
    auto m = build_disk(1.0, 1.0 / 16);
    auto op = assemble(m, BoundaryCondition::dirichlet);
    auto s = solve_lowest(op, 3);
    EXPECT_EQ(count_domains(m, lift_dirichlet_boundary(m, s.vector(0))).count, 1);
    for (int k = 1; k <= 2; ++k) {
        const Vector u = lift_dirichlet_boundary(m, s.vector(k));
        EXPECT_EQ(count_domains(m, u).count, 2);
        EXPECT_TRUE(payne_check(m, extract_level_set(m, u), 2.0 / 16).touches);
    }
}

TEST(Domains, CourantOnRectangle) {
    auto m = build_rectangle(2, 1, 1.0 / 24);
    auto s = solve_lowest(assemble(m, BoundaryCondition::dirichlet), 9);
    for (int k = 0; k < s.size(); ++k)
        EXPECT_LE(count_domains(m, lift_dirichlet_boundary(m, s.vector(k))).count, k + 1) << "k = " << k;
}

TEST(Domains, SphereDegreeOne) {
    auto m = build_sphere(3);
    auto d = count_domains(m, sample(m, [](double, double, double z) { return z; }));
    EXPECT_EQ(d.count, 2);
    EXPECT_NEAR(d.area[0] + d.area[1], m.total_area(), 1e-12);
    EXPECT_NEAR(d.area[0], d.area[1], 1e-12);  // the icosphere is symmetric under z -> -z
}

TEST(Domains, VanishingFunctionRejected) {
    auto m = build_rectangle(1, 1, 0.25);
    EXPECT_THROW(count_domains(m, Vector::Zero(m.vertex_count())), Error);
}

TEST(Hausdorff, BasicCases) {
    auto a = segment_set({0, 0, 0}, {1, 0, 0});
    auto b = segment_set({0, 0.3, 0}, {1, 0.3, 0});
    EXPECT_EQ(hausdorff(a, a, 0.01), 0.0);
    EXPECT_NEAR(hausdorff(a, b, 0.01), 0.3, 1e-15);
    EXPECT_THROW(hausdorff(a, NodalSet{}, 0.1), Error);
}

TEST(Hausdorff, SamplingRefinementIsStable) {
    const double h = 1.0 / 16;
    auto m = build_rectangle(1, 1, h);
    auto a = extract_level_set(m, sample(m, [](double x, double y, double) { return (x - 0.5) * (x - 0.5) + (y - 0.4) * (y - 0.4) - 0.09; }));
    auto b = extract_level_set(m, sample(m, [](double x, double y, double) { return x + 0.3 * y - 0.6; }));
    EXPECT_LT(std::abs(hausdorff(a, b, h / 4) - hausdorff(a, b, h / 8)), h / 4);
}

TEST(Containment, Verdicts) {
    struct Case {
        Region outside;
        double (*f)(double, double);
        Containment expect;
    };
    const Case cases[] = {
        {Region::m2, [](double x, double) { return x - 0.5; }, Containment::contained},
        {Region::m2, [](double, double y) { return y - 0.5; }, Containment::case_c},
        {Region::m1_collar, [](double x, double) { return (x - 0.5) * (x - 1.5); }, Containment::case_d2},
        {Region::m2,
         [](double x, double y) { return (y - 0.25) * ((x - 1.5) * (x - 1.5) + (y - 0.7) * (y - 0.7) - 0.01); },
         Containment::case_d1},
        {Region::m2, [](double x, double) { return x - 1.5; }, Containment::empty_in_m1},
    };
    for (const auto& c : cases) {
        auto m = tagged_strip(c.outside);
        auto set = extract_level_set(m, sample(m, [&](double x, double y, double) { return c.f(x, y); }));
        auto v = classify_containment(m, set);
        EXPECT_EQ(v.kind, c.expect) << to_string(c.expect);
        if (c.expect == Containment::case_c)
            for (const auto& w : v.witnesses) EXPECT_NEAR(w[0], 1.0, 1.0 / 16);
        // relabelling the segment order leaves the verdict unchanged
        std::mt19937 rng(3);
        std::vector<std::size_t> perm(set.segments.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        NodalSet shuffled = set;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            shuffled.segments[i] = set.segments[perm[i]];
            shuffled.component[i] = set.component[perm[i]];
        }
        EXPECT_EQ(classify_containment(m, shuffled).kind, c.expect);
    }
}

TEST(Containment, EmptySetCountsAsContained) {
    auto m = tagged_strip(Region::m2);
    EXPECT_EQ(classify_containment(m, NodalSet{}).kind, Containment::contained);
}

TEST(Density, SquareModeApproachesClosedForm) {
    // sin(2 pi x) sin(2 pi y): farthest point from the zero set at distance 1/4, lambda = 8 pi^2
    auto m = build_rectangle(1, 1, 1.0 / 64);
    const Vector u = sample(m, [](double x, double y, double) { return std::sin(2 * pi * x) * std::sin(2 * pi * y); });
    const double c = wavelength_density(m, extract_level_set(m, lift_dirichlet_boundary(m, u)), 8 * pi * pi);
    EXPECT_NEAR(c, pi / std::sqrt(2.0), 0.05 * pi / std::sqrt(2.0));
}

TEST(InnerRadius, SquareModes) {
    const double h = 1.0 / 32;
    auto m = build_rectangle(1, 1, h);
    const Vector ground = sample(m, [](double x, double y, double) { return std::sin(pi * x) * std::sin(pi * y); });
    auto d0 = count_domains(m, lift_dirichlet_boundary(m, ground));
    inner_radius(m, extract_level_set(m, lift_dirichlet_boundary(m, ground)), d0);
    ASSERT_EQ(d0.count, 1);
    EXPECT_NEAR(d0.inner_radius[0], 0.5, h);

    const Vector second = sample(m, [](double x, double y, double) { return std::sin(2 * pi * x) * std::sin(pi * y); });
    const Vector lifted = lift_dirichlet_boundary(m, second);
    auto d1 = count_domains(m, lifted);
    inner_radius(m, extract_level_set(m, lifted), d1);
    ASSERT_EQ(d1.count, 2);
    for (double r : d1.inner_radius) EXPECT_NEAR(r, 0.25, h);
}

TEST(Output, CsvAndSvg) {
    auto m = build_sphere(2);
    auto set = extract_level_set(m, sample(m, [](double, double, double z) { return z; }));
    std::ostringstream csv, svg;
    write_nodal_csv(csv, set);
    const std::string text = csv.str();
    EXPECT_EQ(text.rfind("tri_id,x0,y0,x1,y1,region\n", 0), 0u);
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), set.segments.size() + 1);
    write_nodal_svg(svg, m, set);
    EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}
