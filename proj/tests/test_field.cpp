#include <catch2/catch_amalgamated.hpp>

#include "twofold/errors.hpp"
#include "twofold/expression.hpp"
#include "twofold/field.hpp"

#include <random>

using namespace twofold;
using Catch::Approx;

namespace {

Vec3 random_point(std::mt19937_64& rng, double r = 3.0) {
    std::uniform_real_distribution<double> u(-r, r);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("parse_field examples", "[field][parse]") {
    const SmoothField f = parse_field("-x2", "1+x1", "-7/5");
    const Vec3 v = f({0.0, 1.0, 0.0});
    CHECK(v[0] == -1.0);
    CHECK(v[1] == 1.0);
    CHECK(v[2] == -7.0 / 5.0);

    CHECK(parse_field("0", "0", "0").is_zero());
    const Vec3 w = parse_field("x1*x2", "-x3", "2")({1.0, 2.0, 3.0});
    CHECK(w == Vec3{2.0, -3.0, 2.0});
}

TEST_CASE("expression grammar", "[field][parse]") {
    const Vec3 x{3.0, 2.0, -1.0};
    CHECK(Expression::parse("2*x1^2").evaluate(x) == 18.0);
    CHECK(Expression::parse("x1-x2-x3").evaluate(x) == 2.0);
    CHECK(Expression::parse("(x1+x2)*x3").evaluate(x) == -5.0);
    CHECK(Expression::parse("--x2").evaluate(x) == 2.0);
    // '-' binds inside base, before '^'
    CHECK(Expression::parse("-x1^2").evaluate(x) == 9.0);
    CHECK(Expression::parse("0-x1^2").evaluate(x) == -9.0);
    CHECK(Expression::parse(" 23/100 ").evaluate(x) == 0.23);
    CHECK(Expression::parse("x3^0").evaluate(x) == 1.0);
}

TEST_CASE("decimals are stored as rationals", "[field][parse]") {
    CHECK(Expression::parse("0.1").to_string() == "1/10");
    CHECK(Expression::parse("2.50").to_string() == "5/2");
    CHECK(Expression::parse("6/4").to_string() == "3/2");
    CHECK(Expression::parse("0.1").evaluate({0, 0, 0}) == 0.1);
}

TEST_CASE("parse errors carry kind and position", "[field][parse]") {
    try {
        (void)Expression::parse("x1 + * x2");
        FAIL("expected a syntax error");
    } catch (const ExpressionError& e) {
        CHECK(e.kind() == ExpressionError::Kind::Syntax);
        CHECK(e.position() == 5);
    }
    try {
        (void)Expression::parse("x1 + y");
        FAIL("expected an unknown identifier");
    } catch (const ExpressionError& e) {
        CHECK(e.kind() == ExpressionError::Kind::UnknownIdentifier);
        CHECK(e.position() == 5);
    }
    CHECK_THROWS_AS(Expression::parse("x4"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("(x1"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("x1)"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse(""), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("1/0"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("x1^-1"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("99999999999999999999999"), ExpressionError);
}

TEST_CASE("printer round trip", "[field][parse]") {
    const char* texts[] = {"-x2", "2/5*x1+1/10*x2-1", "3/10*x2-1/5*x2*x3-2/5", "x1-(x2-x3)", "-(x1+x2)^3",
                           "(x1*x2)^2*x3-7/3", "x1*(x2+x3)*(x1-1)", "2-(3-(4-x1))", "-x1^2+x2^2"};
    std::mt19937_64 rng(7);
    for (const char* text : texts) {
        const Expression e = Expression::parse(text);
        const Expression back = Expression::parse(e.to_string());
        for (int i = 0; i < 100; ++i) {
            const Vec3 x = random_point(rng);
            const double a = e.evaluate(x);
            const double b = back.evaluate(x);
            CHECK(std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("builders and rationals", "[field][expression]") {
    const Expression x1 = Expression::variable(1);
    const Expression e = (x1 * x1 - Expression::constant(Rational(1, 4))).pow(2);
    CHECK(e.evaluate({1.5, 0, 0}) == Approx(4.0));
    CHECK(Rational(6, -4) == Rational(-3, 2));
    CHECK(Rational::from_double(0.2) == Rational(1, 5));
    CHECK(Rational::from_double(-7.0) == Rational(-7));
    CHECK(Rational::from_double(0.1 + 0.2).value() == 0.1 + 0.2);
    CHECK_THROWS_AS(Expression::variable(4), ContractViolation);
    CHECK(Expression().is_zero_constant());
}

TEST_CASE("eval_combination endpoints and midpoint", "[field]") {
    PiecewiseSmoothSystem sys{parse_field("x1*x2", "1-x3", "x2"), parse_field("x3", "x1+x2", "-2"),
                              parse_field("1/5", "x1", "0"), std::nullopt};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const Vec3 x = random_point(rng);
        CHECK(eval_combination(sys, x, 1.0) == sys.f_plus(x));
        CHECK(eval_combination(sys, x, -1.0) == sys.f_minus(x));
        const Vec3 mid = eval_combination(sys, x, 0.0);
        const Vec3 expect = 0.5 * (sys.f_plus(x) + sys.f_minus(x)) + sys.hidden(x);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(mid[k] == Approx(expect[k]).margin(1e-14));
        }
    }
    CHECK_THROWS_AS(eval_combination(sys, {0, 0, 0}, 1.0 + 1e-12), ContractViolation);
    CHECK_THROWS_AS(eval_combination(sys, {0, 0, 0}, -1.5), ContractViolation);
}

TEST_CASE("normal_form_system", "[field]") {
    const auto a = normal_form_system({1, 1, -2.0, -2.0, 0.2});
    CHECK(eval_combination(a, {0.0, 1.0, 1.0}, 0.0)[0] == Approx(0.2).margin(1e-15));
    REQUIRE(a.normal_form.has_value());

    const auto b = normal_form_system({-1, -1, 0.0, 0.0, 0.0});
    const Vec3 vb = eval_combination(b, {0.0, 0.7, -0.3}, 1.0);
    CHECK(vb == Vec3{-0.7, -1.0, 0.0});

    const auto c = normal_form_system({1, -1, 1.0, 1.0, 0.0});
    CHECK(eval_combination(c, {0.0, 0.0, 1.0}, -1.0) == Vec3{1.0, 1.0, -1.0});

    CHECK_THROWS_AS(normal_form_system({2, 1, 0.0, 0.0, 0.0}), ContractViolation);
}

TEST_CASE("eval_piecewise", "[field]") {
    const auto sys = normal_form_system({1, 1, 0.0, 0.0, 0.0});
    CHECK(eval_piecewise(sys, {-1.0, 2.0, 3.0}) == Vec3{3.0, 0.0, 1.0});
    CHECK(eval_piecewise(sys, {0.5, 2.0, 3.0}) == sys.f_plus({0.5, 2.0, 3.0}));
    CHECK(eval_piecewise(sys, {-0.5, 2.0, 3.0}) == sys.f_minus({-0.5, 2.0, 3.0}));
    CHECK_THROWS_AS(eval_piecewise(sys, {0.0, 2.0, 3.0}), ContractViolation);

    // the hidden term never shows off the surface
    auto hidden = sys;
    hidden.hidden = parse_field("5*x2", "x1*x3", "-1");
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        Vec3 x = random_point(rng);
        if (x[0] == 0.0) {
            continue;
        }
        CHECK(eval_piecewise(hidden, x) == eval_piecewise(sys, x));
    }
}
