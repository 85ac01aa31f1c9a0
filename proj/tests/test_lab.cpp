#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nodal_lab/lab.hpp"

using namespace nodal_lab;
using std::numbers::pi;

namespace {

std::string csv_of(const ExperimentReport& r) {
    std::ostringstream os;
    write_records_csv(os, r);
    write_summary_csv(os, r);
    write_series_csv(os, r);
    return os.str();
}

PayneConfig small_payne() {
    PayneConfig c;
    c.h = 1.0 / 8;
    c.eps_max = 0.1;
    c.steps = 2;
    c.m = 3;
    return c;
}

}  // namespace

TEST(Fit, ExactLine) {
    const auto f = fit_line({0, 1, 2, 3}, {1, -1, -3, -5});
    EXPECT_NEAR(f.slope, -2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.residual, 0.0, 1e-14);
    EXPECT_GT(fit_line({0, 1, 2}, {0, 1, 0}).residual, 0.1);
}

TEST(Procrustes, RecoversRotation) {
    Matrix r(5, 2);
    r << 1, 0, 0, 1, 1, 1, 2, -1, 0.5, 3;
    const double a = 0.7;
    Matrix q(2, 2);
    q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    const Matrix g = r * q.transpose();
    std::vector<std::pair<int, int>> rows;
    for (int i = 0; i < 5; ++i) rows.emplace_back(i, i);
    const Matrix back = detail::procrustes(g, r, rows, std::vector<double>(5, 1.0));
    EXPECT_LT((g * back - r).norm(), 1e-12);
}

TEST(Alignment, GroupsFollowRelativeGaps) {
    Spectrum s;
    s.eigenvalues = {0.0, 1.0, 1.05, 2.0, 4.0, 4.1, 4.2};
    const auto g = alignment_groups(s, 6);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0], (std::vector<int>{1, 2}));
    EXPECT_EQ(g[1], (std::vector<int>{3}));
    EXPECT_EQ(g[2], (std::vector<int>{4, 5, 6}));
}

TEST(Alignment, MatchClusterSkipsIntruder) {
    Spectrum s;
    s.eigenvalues = {0.0, 1.9, 2.0, 2.0, 3.1, 6.0, 6.0, 6.0, 6.0};
    EXPECT_EQ(match_cluster(s, {2, 2, 2}), 1);
    EXPECT_EQ(match_cluster(s, {6, 6, 6, 6}), 5);
}

TEST(Parallel, PlacesByIndexAndRethrows) {
    std::vector<int> out(100, -1);
    detail::parallel_for(100, 4, [&](int i) { out[i] = i * i; });
    for (int i = 0; i < 100; ++i) EXPECT_EQ(out[i], i * i);
    std::atomic<int> ran{0};
    EXPECT_THROW(detail::parallel_for(10, 3,
                                      [&](int i) {
                                          ++ran;
                                          if (i == 4) fail(ErrorKind::numerical, "boom");
                                      }),
                 Error);
    EXPECT_GE(ran.load(), 5);  // indices are handed out in order, so 0..4 all ran
}

TEST(Submesh, KeepsTaggedArea) {
    const auto m1 = build_sphere(2);
    const auto m2 = build_flat_torus(2 * pi, 0.5);
    GluedSpec spec;
    spec.epsilon = 0.1;
    spec.epsilon0 = 0.3;
    spec.x1 = m1.points[0];
    spec.x2 = default_x2(m2);
    spec.m2_radius = 0.3;
    const auto g = connected_sum(m1, m2, spec);
    const auto part = region_submesh(g.mesh, Region::m2);
    EXPECT_NEAR(part.total_area(), g.mesh.area_of(Region::m2), 1e-12);
    EXPECT_EQ(part.boundary_loops.size(), 1u);
}

TEST(Payne, NoHolesReproducesReference) {
    auto c = small_payne();
    c.holes.clear();
    const auto r = run_payne_perforation(c);
    ASSERT_FALSE(r.records.empty());
    for (const auto& x : r.records) {
        EXPECT_EQ(x.abs_err, 0.0);
        EXPECT_LT(x.sup_err, 1e-8);
    }
}

TEST(Payne, AttachmentSmallRun) {
    const auto r = run_payne_attachment(small_payne());
    EXPECT_EQ(r.records.size(), 3u * 3u);
    for (const auto* x : r.at_k(2)) {
        EXPECT_EQ(x->payne, 1);
        EXPECT_EQ(x->domains, 2);
    }
    // a larger domain lowers Dirichlet eigenvalues
    for (const auto& x : r.records) EXPECT_LT(x.lambda, x.lambda_ref);
}

TEST(Payne, RejectsInteriorAttachmentPoint) {
    auto c = small_payne();
    c.attach_at = {1.0, 0.5, 0.0};
    EXPECT_THROW(run_payne_attachment(c), Error);
}

TEST(Determinism, SweepCsvIsByteIdentical) {
    auto c = small_payne();
    c.threads = 1;
    const std::string a = csv_of(run_payne_attachment(c));
    c.threads = 4;
    EXPECT_EQ(a, csv_of(run_payne_attachment(c)));

    SweepConfig s;
    s.m1 = "ellipsoid:2:1,1.1,1.25";
    s.m2 = "torus:0.5";
    s.steps = 1;
    s.m = 2;
    s.threads = 2;
    const std::string b = csv_of(run_convergence_sweep(s));
    EXPECT_EQ(b, csv_of(run_convergence_sweep(s)));
}

TEST(Lewy, LowDegreesOnSphere) {
    const auto m = build_sphere(3);
    const auto s = solve_lowest(assemble(m, BoundaryCondition::closed), 8);
    const auto l1 = lewy_search(m, s.eigenvectors.middleCols(1, 3), 200, 1);
    EXPECT_EQ(l1.min_domains, 2);
    EXPECT_EQ(l1.max_domains, 2);
    EXPECT_LE(l1.samples, 200);
    const auto l2 = lewy_search(m, s.eigenvectors.middleCols(4, 5), 300, 2);
    EXPECT_EQ(l2.min_domains, 3);
    EXPECT_NEAR(l2.best.norm(), 1.0, 1e-12);
}

TEST(Lewy, SmallTransferKeepsCounts) {
    LewyConfig c;
    c.subdivision = 3;
    c.degrees = {1, 2};
    c.budget = 300;
    const auto r = run_lewy(c);
    EXPECT_EQ(r.get("glued_euler_characteristic"), 0.0);  // sphere # torus
    EXPECT_EQ(r.get("sphere_min_domains_l1"), 2.0);
    EXPECT_EQ(r.get("sphere_min_domains_l2"), 3.0);
    EXPECT_EQ(r.get("glued_domains_l1"), 2.0);
    EXPECT_EQ(r.get("glued_domains_l2"), 3.0);
    for (const auto& x : r.records) EXPECT_EQ(x.verdict, to_string(Containment::contained));
}

TEST(Lewy, ClusterResolution) {
    Spectrum s;
    s.eigenvalues = {0, 2, 2, 2, 6, 6.01, 6.02, 6.02, 6.03, 12};
    EXPECT_TRUE(degree_cluster_resolved(s, 1));
    EXPECT_TRUE(degree_cluster_resolved(s, 2));
    EXPECT_FALSE(degree_cluster_resolved(s, 3));  // not enough eigenvalues
    s.eigenvalues = {0, 2, 2.3, 2.6, 6, 6, 6, 6, 6, 12};
    EXPECT_FALSE(degree_cluster_resolved(s, 1));  // spread too large
    s.eigenvalues = {0, 2, 2.05, 2.1, 2.5, 6, 6, 6, 6, 12};
    EXPECT_FALSE(degree_cluster_resolved(s, 1));  // neighbour too close
    LewyConfig c;
    c.degrees = {3};
    c.subdivision = 1;
    c.budget = 0;
    EXPECT_THROW(run_lewy(c), Error);
}

TEST(Payne, OverlayAndShortScheduleFlag) {
    const auto r = run_payne_attachment(small_payne());
    ASSERT_EQ(r.figures.size(), 1u);
    EXPECT_EQ(r.figures[0].first, "payne_attach_nodal.svg");
    EXPECT_NE(r.figures[0].second.find("<svg"), std::string::npos);
    EXPECT_EQ(r.flags.size(), 1u);  // steps = 2
}
