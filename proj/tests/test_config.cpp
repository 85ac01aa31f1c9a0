#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "nodal_lab/config.hpp"
#include "nodal_lab/lab.hpp"

using namespace nodal_lab;
using std::numbers::pi;

TEST(Config, ParsesKeysCommentsAndWhitespace) {
    const auto c = Config::parse_string(
        "# header\n"
        "geometry.m1 = sphere:4\n"
        "  sweep.eps0=0.2   # trailing comment\n"
        "\n"
        "sweep.steps = 5\n");
    EXPECT_EQ(c.get("geometry.m1", std::string()), "sphere:4");
    EXPECT_DOUBLE_EQ(c.get("sweep.eps0", 0.0), 0.2);
    EXPECT_EQ(c.get("sweep.steps", 0), 5);
    EXPECT_EQ(c.get("absent", 7), 7);
    EXPECT_TRUE(c.unused().empty());
}

TEST(Config, ReportsUnreadKeys) {
    const auto c = Config::parse_string("a = 1\nb = 2\n");
    (void)c.get("a", 0);
    ASSERT_EQ(c.unused().size(), 1u);
    EXPECT_EQ(c.unused()[0], "b");
}

TEST(Config, MalformedInputIsAnInputError) {
    auto kind_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::io;  // sentinel: nothing thrown
    };
    EXPECT_EQ(kind_of([] { Config::parse_string("no equals sign\n"); }), ErrorKind::invalid_input);
    EXPECT_EQ(kind_of([] { Config::parse_string("= 3\n"); }), ErrorKind::invalid_input);
    EXPECT_EQ(kind_of([] { Config::parse_string("a = 1\na = 2\n"); }), ErrorKind::invalid_input);
    const auto c = Config::parse_string("x = 1.5\ny = abc\nz = maybe\n");
    EXPECT_EQ(kind_of([&] { c.get("x", 0); }), ErrorKind::invalid_input);
    EXPECT_EQ(kind_of([&] { c.get("y", 0.0); }), ErrorKind::invalid_input);
    EXPECT_EQ(kind_of([&] { c.get("z", false); }), ErrorKind::invalid_input);
    EXPECT_EQ(kind_of([&] { c.require_string("missing"); }), ErrorKind::invalid_input);
    EXPECT_EQ(kind_of([] { Config::load("/nonexistent/file.cfg"); }), ErrorKind::invalid_input);
}

TEST(Config, ListsAndBooleans) {
    const auto c = Config::parse_string("l = 2, 3,4\nb = true\nn = 0\n");
    EXPECT_EQ(c.get_list("l", {}), (std::vector<double>{2, 3, 4}));
    EXPECT_TRUE(c.get("b", false));
    EXPECT_FALSE(c.get("n", true));
}

TEST(Geometry, AllKinds) {
    EXPECT_EQ(parse_geometry("sphere:2").vertex_count(), 162);
    EXPECT_NEAR(parse_geometry("torus:0.5").total_area(), 4 * pi * pi, 1e-9);
    EXPECT_NEAR(parse_geometry("rectangle:2,1:0.25").total_area(), 2.0, 1e-12);
    EXPECT_NEAR(parse_geometry("disk:1:0.1").total_area(), pi, 0.02);
    EXPECT_NEAR(parse_geometry("polygon:0,0,1,0,0,1:0.2").total_area(), 0.5, 1e-12);
    EXPECT_EQ(parse_geometry("genus:2:0.2").euler_characteristic(), -2);
    const auto e = parse_geometry("ellipsoid:2:1,2,3");
    EXPECT_TRUE(e.closed());
    EXPECT_THROW(parse_geometry("cube:3"), Error);
    EXPECT_THROW(parse_geometry("sphere"), Error);
    EXPECT_THROW(parse_geometry("sphere:1.5"), Error);
    EXPECT_THROW(parse_geometry("ellipsoid:2:1,2"), Error);
}

TEST(Geometry, FileRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "nodal_lab_geometry_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "m.imesh").string();
    const auto m = build_rectangle(1, 1, 0.25);
    save_imesh(path, m);
    const auto back = parse_geometry("file:" + path);
    EXPECT_EQ(back.triangles, m.triangles);
    EXPECT_NEAR(back.total_area(), 1.0, 1e-12);
}

TEST(SweepConfig, ExampleKeys) {
    const auto c = Config::parse_string(
        "geometry.m1 = sphere:4\nsweep.eps0 = 0.2\nsweep.steps = 5\nsolve.m = 6\nsolve.tol = 1e-9\nseed = 42\nout = ./results\n");
    const auto s = SweepConfig::from(c);
    EXPECT_EQ(s.m1, "sphere:4");
    EXPECT_DOUBLE_EQ(s.eps0, 0.2);
    EXPECT_EQ(s.steps, 5);
    EXPECT_EQ(s.m, 6);
    EXPECT_DOUBLE_EQ(s.tol, 1e-9);
    EXPECT_EQ(s.seed, 42u);
    EXPECT_EQ(s.out, "./results");
    EXPECT_TRUE(c.unused().empty());
    EXPECT_EQ(s.schedule(0.16).size(), 6u);
    EXPECT_DOUBLE_EQ(s.schedule(0.16).back(), 0.005);
}

TEST(SweepConfig, Validation) {
    EXPECT_THROW(SweepConfig::from(Config::parse_string("sweep.eps0 = 0.1\nsweep.eps_max = 0.2\n")), Error);
    EXPECT_THROW(SweepConfig::from(Config::parse_string("solve.tol = 0.5\n")), Error);
    EXPECT_THROW(SweepConfig::from(Config::parse_string("threshold.m_list = 2, 2.5\n")), Error);
    EXPECT_THROW(SweepConfig::from(Config::parse_string("surgery.loop_nodes = 7\n")), Error);
    EXPECT_THROW(SweepConfig::from(Config::parse_string("geometry.eta = -1\n")), Error);
    EXPECT_THROW(PayneConfig::from(Config::parse_string("payne.h = 3\n")), Error);
    EXPECT_THROW(LewyConfig::from(Config::parse_string("lewy.budget = 20000\n")), Error);
}
