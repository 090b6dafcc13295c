#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace curvetree;

TEST_CASE("parsing builds the expanded term map") {
    Polynomial p = parse_polynomial("x^2 + y^2");
    CHECK(p.coeff(2, 0) == Rational(1));
    CHECK(p.coeff(0, 2) == Rational(1));
    CHECK(p.terms().size() == 2);

    Polynomial crescent = parse_polynomial("x^2 + (y^2 - x)^2");
    CHECK(crescent.coeff(2, 0) == Rational(2));
    CHECK(crescent.coeff(1, 2) == Rational(-2));
    CHECK(crescent.coeff(0, 4) == Rational(1));
    CHECK(crescent.terms().size() == 3);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        parse_polynomial("x^2 +");
        FAIL("expected a syntax error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 5);
    }
    CHECK_THROWS_AS(parse_polynomial("x^2 + z"), UnknownIdentifier);
    CHECK_THROWS_AS(parse_polynomial("x^65"), ExponentOverflow);
    CHECK_THROWS_AS(parse_polynomial("(x^40)^2"), ExponentOverflow);
    CHECK_THROWS_AS(parse_polynomial("x^2 + 1/0"), ParseError);
    CHECK_THROWS_AS(parse_polynomial(""), ParseError);
}

TEST_CASE("grammar details: juxtaposition, rationals, decimals, parens") {
    CHECK(parse_polynomial("2x y") == parse_polynomial("2*x*y"));
    CHECK(parse_polynomial("3/2 x") == parse_polynomial("3x - 3/2x"));
    CHECK(parse_polynomial("0.25 y^2").coeff(0, 2) == Rational(1, 4));
    CHECK(parse_polynomial("(x + y)^2") == parse_polynomial("x^2 + 2x y + y^2"));
    CHECK(parse_polynomial("2^3").coeff(0, 0) == Rational(8));
}

TEST_CASE("print then reparse is a fixed point on the term map") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> exp(0, 6), coef(-9, 9), den(1, 5);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial p;
        for (int t = 0; t < 8; ++t)
            p.add_term(exp(rng), exp(rng), Rational(coef(rng), den(rng)));
        Polynomial q = parse_polynomial(p.to_string());
        CHECK(q == p);
        CHECK(parse_polynomial(q.to_string()) == q);
    }
}

TEST_CASE("evaluation at the paper's coordinates") {
    Polynomial f = testutil::banana();
    CHECK(f.evaluate(0, 0) == 0.0);
    double eps = 0.1;
    CHECK(f.evaluate(std::sqrt(eps / 2), 0) == doctest::Approx(eps).epsilon(1e-12));
    CHECK(f.evaluate(std::sqrt(eps), std::pow(eps, 0.25)) == doctest::Approx(eps).epsilon(1e-12));
    CHECK(testutil::circle().evaluate(0, 0) == 0.0);
}

TEST_CASE("evaluation is additive within a few ulps") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> exp(0, 8), coef(-20, 20);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        Polynomial p, q;
        for (int t = 0; t < 6; ++t) {
            p.add_term(exp(rng), exp(rng), Rational(coef(rng)));
            q.add_term(exp(rng), exp(rng), Rational(coef(rng)));
        }
        double x = pt(rng), y = pt(rng);
        auto [vp, sp] = p.evaluate_with_scale(x, y);
        auto [vq, sq] = q.evaluate_with_scale(x, y);
        double lhs = (p + q).evaluate(x, y);
        double tol = 4.0 * (sp + sq) * std::numeric_limits<double>::epsilon();
        CHECK(std::fabs(lhs - (vp + vq)) <= tol + 1e-300);
    }
}

TEST_CASE("partial derivatives") {
    CHECK(partial_derivative(testutil::circle(), Var::y) == parse_polynomial("2y"));
    Polynomial gp = partial_derivative(testutil::banana(), Var::y);
    CHECK(gp.coeff(0, 3) == Rational(4));
    CHECK(gp.coeff(1, 1) == Rational(-4));
    CHECK(gp.terms().size() == 2);

    // zero set of the bone example's polar on its three components
    Polynomial gu = partial_derivative(testutil::bone(), Var::y);
    for (double t : {0.1, 0.3, 0.6}) {
        CHECK(gu.evaluate(t, 0.0) == 0.0);                            // y = 0
        CHECK(std::fabs(gu.evaluate(t * t, t)) < 1e-14);              // y^2 = x
        CHECK(std::fabs(gu.evaluate(-t * t, t)) < 1e-14);             // y^2 = -x
    }
}

TEST_CASE("mixed partials commute exactly") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> exp(0, 10), coef(-50, 50);
    for (int trial = 0; trial < 50; ++trial) {
        Polynomial p;
        for (int t = 0; t < 10; ++t) p.add_term(exp(rng), exp(rng), Rational(coef(rng)));
        CHECK(p.derivative(Var::x).derivative(Var::y) == p.derivative(Var::y).derivative(Var::x));
    }
}

TEST_CASE("derivative drops the degree in the variable by one") {
    Polynomial p = parse_polynomial("x^5 y + x^2 + y^3");
    CHECK(p.degree_in(Var::x) == 5);
    CHECK(p.derivative(Var::x).degree_in(Var::x) == 4);
    CHECK(Polynomial().degree() == -1);
}

TEST_CASE("hessian at points") {
    SymMatrix2 h = hessian_at(testutil::circle(), 0, 0);
    CHECK(h.a11 == 2.0);
    CHECK(h.a12 == 0.0);
    CHECK(h.a22 == 2.0);
    CHECK(h.classify() == Definiteness::positive_definite);

    SymMatrix2 ab = hessian_at(parse_polynomial("3x^2 + 5y^2"), 0, 0);
    CHECK(ab.a11 == 6.0);
    CHECK(ab.a22 == 10.0);
    CHECK(ab.classify() == Definiteness::positive_definite);

    // degenerate minimum: hessian [[4,0],[0,0]]
    SymMatrix2 hc = hessian_at(testutil::banana(), 0, 0);
    CHECK(hc.a11 == 4.0);
    CHECK(hc.a12 == 0.0);
    CHECK(hc.a22 == 0.0);
    CHECK(hc.classify() == Definiteness::positive_semidefinite);
    CHECK(hessian_definiteness_exact(testutil::banana(), Rational(0), Rational(0)) ==
          Definiteness::positive_semidefinite);

    CHECK(hessian_at(parse_polynomial("x^2 - y^2"), 0, 0).classify() == Definiteness::indefinite);
}

TEST_CASE("exact evaluation and dyadic doubles") {
    Polynomial f = testutil::banana();
    Rational x = Rational::from_double(0.5);
    CHECK(x == Rational(1, 2));
    Rational v = f.evaluate_exact(Rational(1, 2), Rational(1, 2));
    // 2*(1/2)^2 - 2*(1/2)(1/2)^2 + (1/2)^4
    CHECK(v == Rational(1, 2) - Rational(1, 4) + Rational(1, 16));
}

TEST_CASE("divisibility by x and y-symmetry") {
    CHECK(parse_polynomial("x y + x^2").divisible_by_x());
    CHECK(!parse_polynomial("x y + y^2").divisible_by_x());
    CHECK(testutil::banana().symmetric_in_y());
    CHECK(!parse_polynomial("x^2 + y^3").symmetric_in_y());
}

TEST_CASE("double-double evaluation resolves cancellation") {
    // f(x, y) = (x - 1)^8 near x = 1 cancels catastrophically in doubles
    Polynomial p = parse_polynomial("(x - 1)^8");
    double x = 1.0 + 1e-3;
    dd v = p.evaluate_dd(x, 0.0);
    CHECK(v.value() == doctest::Approx(1e-24).epsilon(1e-9));
}
