#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace curvetree;
using namespace testutil;

TEST_CASE("tracing the circle level set") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(circle(), cfg);
    LevelCurve c = trace_level(circle(), 0.04, nb, cfg);
    REQUIRE(c.points.size() > 100);
    for (const Vec2& p : c.points)
        CHECK(std::fabs(p.norm() - 0.2) < 1e-9);
    for (double r : c.residuals)
        CHECK(r <= cfg.refine_tol * 0.04);
    JordanReport rep = verify_jordan(c);
    CHECK(rep.pass());
    CHECK(rep.winding == 1);
    CHECK(rep.simple);
    CHECK(rep.counterclockwise);
}

TEST_CASE("the banana level curve passes near the paper's marked points") {
    TraceConfig cfg;
    double eps = 0.1;
    Neighbourhood nb = good_neighbourhood(banana(), cfg);
    CHECK(nb.radius == 1.0);
    LevelCurve c = trace_level(banana(), eps, nb, cfg);
    CHECK(verify_jordan(c).pass());

    auto near_curve = [&](Vec2 q) {
        double d = 1e300;
        for (std::size_t i = 0; i < c.points.size(); ++i)
            d = std::min(d, dist_point_segment(q, c.points[i],
                                               c.points[(i + 1) % c.points.size()]));
        return d;
    };
    double cell = 2.0 * nb.radius / c.grid_used;
    CHECK(near_curve({std::sqrt(eps / 2), 0}) < cell);
    CHECK(near_curve({std::sqrt(eps), std::pow(eps, 0.25)}) < cell);
    CHECK(near_curve({std::sqrt(eps), -std::pow(eps, 0.25)}) < cell);
}

TEST_CASE("a level that leaves the neighbourhood fails loudly") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(banana(), cfg);
    CHECK_THROWS_AS(trace_level(banana(), 10.0, nb, cfg), LevelEscapesNeighbourhood);
}

TEST_CASE("a level far below the grid resolution reports no component") {
    TraceConfig cfg;
    cfg.grid_n = 255; // odd: no node at the origin to seed the contour
    cfg.max_refine = 0;
    Neighbourhood nb = good_neighbourhood(circle(), cfg);
    CHECK_THROWS_AS(trace_level(circle(), 1e-12, nb, cfg), NoComponentAroundOrigin);
}

TEST_CASE("with the origin on a grid node, even tiny levels trace cleanly") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(circle(), cfg);
    LevelCurve c = trace_level(circle(), 1e-12, nb, cfg);
    CHECK(verify_jordan(c).pass());
    for (const Vec2& p : c.points) CHECK(p.norm() == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("preconditions") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(circle(), cfg);
    CHECK_THROWS_AS(trace_level(circle(), -1.0, nb, cfg), DegenerateInput);
    Neighbourhood unaccepted;
    unaccepted.radius = 1.0;
    CHECK_THROWS_AS(trace_level(circle(), 0.1, unaccepted, cfg), DegenerateInput);
}

TEST_CASE("verify_jordan flags a figure-eight") {
    LevelCurve fake;
    fake.f = circle();
    fake.epsilon = 1;
    fake.points = {{-1, 0}, {0, 0.5}, {1, 0}, {0, -0.5},
                   {-1, 0.2}, {0, -0.7}, {1, 0.2}, {0, 0.7}};
    fake.residuals.assign(fake.points.size(), 0.0);
    JordanReport rep = verify_jordan(fake);
    CHECK(!rep.simple);
    CHECK(rep.crossing.has_value());
    CHECK(!rep.pass());
}

TEST_CASE("y-symmetric polynomials give y-symmetric traces") {
    TraceConfig cfg;
    for (auto& [f, eps] : std::vector<std::pair<Polynomial, double>>{
             {banana(), 0.1}, {bone(), 3e-4}}) {
        Neighbourhood nb = good_neighbourhood(f, cfg);
        LevelCurve c = trace_level(f, eps, nb, cfg);
        double worst = 0;
        for (const Vec2& p : c.points) {
            double best = 1e300;
            for (std::size_t i = 0; i < c.points.size(); ++i) {
                Vec2 a = c.points[i], b = c.points[(i + 1) % c.points.size()];
                best = std::min(best, dist_point_segment({p.x, -p.y}, a, b));
            }
            worst = std::max(worst, best);
        }
        CHECK(worst < 1e-9 * nb.radius);
    }
}

TEST_CASE("halving the grid spacing changes the area by at most 1%") {
    struct Case { Polynomial f; double eps; };
    std::vector<Case> cases = {{circle(), 0.04}, {banana(), 0.1}, {bone(), 3e-4},
                               {acnode(), 0.02}};
    for (const auto& [f, eps] : cases) {
        TraceConfig coarse;
        coarse.grid_n = 256;
        coarse.max_refine = 0;
        TraceConfig fine = coarse;
        fine.grid_n = 512;
        Neighbourhood nb = good_neighbourhood(f, coarse);
        double a0 = polygon_area(trace_level(f, eps, nb, coarse).points);
        double a1 = polygon_area(trace_level(f, eps, nb, fine).points);
        CHECK(std::fabs(a1 - a0) <= 0.01 * a1);
    }
}

TEST_CASE("adaptive refinement resolves a small banana level") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(banana(), cfg);
    LevelCurve c = trace_level(banana(), 1e-4, nb, cfg);
    CHECK(verify_jordan(c).pass());
    // the dimple must be resolved: winding around a point just right of the
    // inner tangency is zero (outside), around the origin one (inside)
    CHECK(winding_number(c.points, {std::sqrt(1e-4 / 2) * 1.05, 0.0}) == 0);
    CHECK(winding_number(c.points, {0, 0}) == 1);
}

TEST_CASE("every refined point satisfies the residual bound") {
    TraceConfig cfg;
    for (auto& [f, eps] : std::vector<std::pair<Polynomial, double>>{
             {banana(), 0.1}, {bone(), 1e-4}, {double_banana(), 1e-3}, {acnode(), 0.02}}) {
        Neighbourhood nb = good_neighbourhood(f, cfg);
        LevelCurve c = trace_level(f, eps, nb, cfg);
        REQUIRE(c.residuals.size() == c.points.size());
        for (double r : c.residuals) CHECK(r <= cfg.refine_tol * eps);
    }
}

TEST_CASE("config files override the defaults") {
    std::string path = "trace_config_test.tmp";
    {
        std::ofstream out(path);
        out << "# comment\n";
        out << "grid_n = 128\n";
        out << "max_refine=1\n";
        out << "refine_tol = 1e-8\n";
        out << "nbhd_candidates = 0.5, 0.25\n";
    }
    TraceConfig cfg = load_trace_config(path);
    CHECK(cfg.grid_n == 128);
    CHECK(cfg.max_refine == 1);
    CHECK(cfg.refine_tol == 1e-8);
    REQUIRE(cfg.nbhd_candidates.size() == 2);
    CHECK(cfg.nbhd_candidates[0] == 0.5);
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "grid_n = twelve\n";
    }
    CHECK_THROWS_AS(load_trace_config(path), DegenerateInput);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_trace_config("does_not_exist.cfg"), IoError);
}
