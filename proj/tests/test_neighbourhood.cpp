#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace curvetree;
using namespace testutil;

TEST_CASE("global minima accept the default cap") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(circle(), cfg);
    CHECK(nb.accepted);
    CHECK(nb.radius == 1.0);
    CHECK(nb.checks.all());
    CHECK(nb.checks.grid_samples == cfg.positivity_grid);

    Neighbourhood nc = good_neighbourhood(banana(), cfg);
    CHECK(nc.radius == 1.0);
}

TEST_CASE("the acnode cubic needs a radius below 1") {
    TraceConfig cfg;
    cfg.nbhd_candidates = {1.5, 0.5};
    Neighbourhood nb = good_neighbourhood(acnode(), cfg);
    CHECK(nb.accepted);
    CHECK(nb.radius == 0.5);

    // the far zero-locus component enters every candidate here
    TraceConfig bad = cfg;
    bad.nbhd_candidates = {1.5};
    CHECK_THROWS_AS(good_neighbourhood(acnode(), bad), NoValidRadius);
}

TEST_CASE("the deformed-branch example rejects radius 1 (far zero at (0,-1))") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(deformed_branch(), cfg);
    CHECK(nb.accepted);
    CHECK(nb.radius < 1.0);
}

TEST_CASE("non-minima are rejected") {
    TraceConfig cfg;
    // saddle: negative samples arbitrarily close to the origin
    CHECK_THROWS_AS(good_neighbourhood(parse_polynomial("x^2 - y^2"), cfg), NotAStrictMinimum);
    // nonzero gradient
    CHECK_THROWS_AS(good_neighbourhood(parse_polynomial("x + y^2"), cfg), NotAStrictMinimum);
    // f(0,0) != 0
    CHECK_THROWS_AS(good_neighbourhood(parse_polynomial("1 + x^2 + y^2"), cfg), NotAStrictMinimum);
}

TEST_CASE("checks record the evidence") {
    TraceConfig cfg;
    Neighbourhood nb = good_neighbourhood(bone(), cfg);
    CHECK(nb.checks.only_minimum);
    CHECK(nb.checks.isolated_zero);
    CHECK(nb.checks.polar_smooth);
    CHECK(nb.checks.f_monotone);
    CHECK(nb.checks.x_monotone);
    CHECK(nb.checks.single_boundary_crossing);
    CHECK(nb.checks.circle_samples > 0);
}
