#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace curvetree;
using namespace testutil;

TEST_CASE("polar curves of the running examples") {
    CHECK(polar_curve(circle()) == parse_polynomial("2y"));
    CHECK(polar_curve(banana()) == parse_polynomial("4y^3 - 4x y"));
    CHECK_THROWS_AS(polar_curve(parse_polynomial("x^2")), ConstantInY);

    // four components: y = 0, y^2 = x, y^4 + y^2 = x, and the ridge branch
    Polynomial gd = polar_curve(double_banana());
    for (double t : {0.2, 0.4, 0.6}) {
        CHECK(std::fabs(gd.evaluate(t, 0.0)) == 0.0);
        CHECK(std::fabs(gd.evaluate(t * t, t)) < 1e-12);
        CHECK(std::fabs(gd.evaluate(t * t * t * t + t * t, t)) < 1e-12);
        double ridge_x = t * t * (3 * t * t + 2) / (2 * (t * t + 1));
        CHECK(std::fabs(gd.evaluate(ridge_x, t)) < 1e-12);
    }
    CHECK(!gd.divisible_by_x());
}

TEST_CASE("a polar containing the projection direction is rejected") {
    // zero on the whole y-axis, so the origin is not a strict minimum and
    // df/dy picks up a factor of x
    Polynomial f = parse_polynomial("x^2 y^2 + x^4");
    CHECK_THROWS_AS(polar_curve(f), PolarContainsProjection);
}

TEST_CASE("half-branch counts for the example suite") {
    TraceConfig cfg;
    auto count = [&](const Polynomial& f) {
        Neighbourhood nb = good_neighbourhood(f, cfg);
        return polar_half_branches(f, nb, cfg).size();
    };
    CHECK(count(circle()) == 2);
    CHECK(count(banana()) == 4);
    CHECK(count(bone()) == 6);
    CHECK(count(double_banana()) == 8);
}

TEST_CASE("half-branch invariants: origin germ, constant side, boundary exit") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(banana(), cfg);
    auto branches = polar_half_branches(banana(), nb, cfg);
    Polynomial g = polar_curve(banana());
    Polynomial gx = g.derivative(Var::x), gy = g.derivative(Var::y);
    int left = 0, right = 0;
    for (const HalfBranch& hb : branches) {
        REQUIRE(hb.samples.size() >= 3);
        CHECK(hb.samples.front().norm() < 1e-12);
        CHECK(hb.samples.back().norm() == doctest::Approx(nb.radius).epsilon(1e-9));
        (hb.side == BranchSide::right ? right : left)++;
        double seed_r = nb.radius * kSeedCircleFactor;
        for (const Vec2& p : hb.samples) {
            if (p.norm() <= seed_r / 8) continue;
            double scale = std::hypot(gx.evaluate(p.x, p.y), gy.evaluate(p.x, p.y)) * p.norm();
            CHECK(std::fabs(g.evaluate(p.x, p.y)) <= kBranchTol * std::max(scale, 1e-12));
            if (hb.side == BranchSide::right) CHECK(p.x > 0);
            else CHECK(p.x < 0);
        }
    }
    CHECK(left == 1);
    CHECK(right == 3);
}

TEST_CASE("monotonicity reports along branches") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(banana(), cfg);
    auto branches = polar_half_branches(banana(), nb, cfg);
    for (const HalfBranch& hb : branches) {
        auto mx = check_monotone_along_branch(hb, MonotoneProbe::coordinate_x);
        CHECK(mx.strict());
        CHECK(mx.increasing() == (hb.side == BranchSide::right));
        auto mf = check_monotone_along_branch(hb, MonotoneProbe::function_f, banana());
        CHECK(mf.increasing());
        auto md = check_monotone_along_branch(hb, MonotoneProbe::squared_distance);
        CHECK(md.increasing());
    }

    HalfBranch synthetic;
    synthetic.samples = {{0, 0}, {0.1, 0}, {0.1, 0}, {0.2, 0}};
    auto rep = check_monotone_along_branch(synthetic, MonotoneProbe::coordinate_x);
    CHECK(!rep.strict());
    REQUIRE(rep.violation_index.has_value());
    CHECK(*rep.violation_index == 2);
}

TEST_CASE("no half-branch reverses in x on an accepted neighbourhood") {
    TraceConfig cfg;
    for (const Polynomial& f : {banana(), bone(), double_banana(), deformed_branch()}) {
        Neighbourhood nb = good_neighbourhood(f, cfg);
        for (const HalfBranch& hb : polar_half_branches(f, nb, cfg))
            CHECK(check_monotone_along_branch(hb, MonotoneProbe::coordinate_x).strict());
    }
}

TEST_CASE("vertical tangencies of the circle") {
    TraceConfig cfg;
    auto run = run_pipeline(circle(), 0.04, cfg);
    REQUIRE(run.tangencies.size() == 2);
    CHECK(run.tangencies[0].position.x == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(run.tangencies[1].position.x == doctest::Approx(0.2).epsilon(1e-9));
    for (const auto& t : run.tangencies) {
        CHECK(std::fabs(t.position.y) < 1e-9);
        CHECK(t.parity == TangencyParity::even);
    }
}

TEST_CASE("vertical tangencies of the banana example at eps = 0.1") {
    TraceConfig cfg;
    double eps = 0.1;
    auto run = run_pipeline(banana(), eps, cfg);
    REQUIRE(run.tangencies.size() == 4);
    CHECK(run.tangencies[0].position.x == doctest::Approx(-std::sqrt(eps / 2)).epsilon(1e-9));
    CHECK(run.tangencies[1].position.x == doctest::Approx(std::sqrt(eps / 2)).epsilon(1e-9));
    CHECK(run.tangencies[2].position.x == doctest::Approx(std::sqrt(eps)).epsilon(1e-9));
    CHECK(run.tangencies[3].position.x == doctest::Approx(std::sqrt(eps)).epsilon(1e-9));
    CHECK(run.tangencies[2].position.y == doctest::Approx(-std::pow(eps, 0.25)).epsilon(1e-9));
    CHECK(run.tangencies[3].position.y == doctest::Approx(std::pow(eps, 0.25)).epsilon(1e-9));
    for (const auto& t : run.tangencies) CHECK(t.parity == TangencyParity::even);
}

TEST_CASE("tangencies sit on traced polar half-branches") {
    TraceConfig cfg;
    struct Case { Polynomial f; double eps; std::size_t expected; };
    std::vector<Case> cases = {{banana(), 0.1, 4}, {bone(), 1e-4, 6}};
    for (auto& [f, eps, expected] : cases) {
        auto run = run_pipeline(f, eps, cfg);
        auto branches = polar_half_branches(f, run.nbhd, cfg);
        auto tangencies = run.tangencies;
        CHECK(tangencies.size() == expected);
        assign_tangencies_to_branches(tangencies, branches, 1e-6 * run.nbhd.radius);
        for (const auto& t : tangencies) {
            INFO("tangency at ", t.position.x, ",", t.position.y);
            CHECK(t.branch_id.has_value());
        }
        // mirror symmetry of off-axis tangencies
        for (const auto& t : tangencies) {
            if (std::fabs(t.position.y) < 1e-9) continue;
            bool mirrored = false;
            for (const auto& u : tangencies)
                if (std::fabs(u.position.x - t.position.x) < 1e-9 &&
                    std::fabs(u.position.y + t.position.y) < 1e-9)
                    mirrored = true;
            CHECK(mirrored);
        }
    }
}

TEST_CASE("tangency count is even after merging") {
    TraceConfig cfg;
    for (auto& [f, eps] : std::vector<std::pair<Polynomial, double>>{
             {circle(), 0.04}, {banana(), 0.1}, {bone(), 1e-4}, {double_banana(), 1e-3}}) {
        auto run = run_pipeline(f, eps, cfg);
        CHECK(run.tangencies.size() % 2 == 0);
    }
}

TEST_CASE("odd tangencies are detected and flagged") {
    TraceConfig cfg;
    double eps = 0.01;
    auto run = run_pipeline(snake(), eps, cfg);
    // two fold extremes (even) and two inflection-type tangencies (odd)
    int odd = 0, even = 0;
    for (const auto& t : run.tangencies)
        (t.parity == TangencyParity::odd ? odd : even)++;
    CHECK(even == 2);
    CHECK(odd == 2);
    // the odd ones sit at x = +-sqrt(eps/2) on the axis
    for (const auto& t : run.tangencies) {
        if (t.parity != TangencyParity::odd) continue;
        CHECK(std::fabs(std::fabs(t.position.x) - std::sqrt(eps / 2)) < 1e-6);
        CHECK(std::fabs(t.position.y) < 1e-6);
    }
}
