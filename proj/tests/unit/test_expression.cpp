#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include <wsturm/expression.hpp>

using namespace wsturm;
using namespace wsturm::expr;

TEST_CASE("basic evaluation") {
    CHECK(evaluate(parse("sin(pi*x)"), 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(parse("x^0.4"), 0.0016) ==
          doctest::Approx(std::pow(0.0016, 0.4)).epsilon(1e-15));
    CHECK(evaluate(parse("2*x+1"), 3.0) == doctest::Approx(7.0));
    CHECK(evaluate(parse("pow(x, 3)"), 2.0) == doctest::Approx(8.0));
    CHECK(evaluate(parse("abs(-x)"), 2.5) == doctest::Approx(2.5));
    CHECK(evaluate(parse("exp(0)"), 0.0) == doctest::Approx(1.0));
    CHECK(evaluate(parse("log(exp(1))"), 0.0) == doctest::Approx(1.0));
    CHECK(evaluate(parse("sqrt(y)"), 0.0, 9.0) == doctest::Approx(3.0));
    CHECK(evaluate(parse("1+t"), 0.0, 0.0, 0.25) == doctest::Approx(1.25));
}

TEST_CASE("equivalent forms agree on random points") {
    Expression a = parse("2*x+1");
    Expression b = parse("1+x*2");
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        double x = dist(rng);
        CHECK(evaluate(a, x) == doctest::Approx(evaluate(b, x)).epsilon(1e-14));
    }
}

TEST_CASE("precedence and associativity") {
    // '^' binds tighter than unary minus, which binds tighter than '*'.
    CHECK(evaluate(parse("-x^2"), 3.0) == doctest::Approx(-9.0));
    CHECK(evaluate(parse("(-x)^2"), 3.0) == doctest::Approx(9.0));
    CHECK(evaluate(parse("2^3^2"), 0.0) == doctest::Approx(512.0)); // right associative
    CHECK(evaluate(parse("2^-3"), 0.0) == doctest::Approx(0.125));
    CHECK(evaluate(parse("x-1-1"), 5.0) == doctest::Approx(3.0)); // left associative
    CHECK(evaluate(parse("12/2/3"), 0.0) == doctest::Approx(2.0));
    CHECK(evaluate(parse("2+3*4"), 0.0) == doctest::Approx(14.0));
    CHECK(evaluate(parse("-2*3"), 0.0) == doctest::Approx(-6.0));
}

TEST_CASE("parse errors carry a position") {
    CHECK_THROWS_AS(parse("sin(x"), parse_error);
    CHECK_THROWS_AS(parse("2 +"), parse_error);
    CHECK_THROWS_AS(parse("x + * y"), parse_error);
    CHECK_THROWS_AS(parse(""), parse_error);
    CHECK_THROWS_AS(parse("pow(x)"), parse_error);
    CHECK_THROWS_AS(parse("sin(x, y)"), parse_error);

    try {
        parse("x + bogus");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("evaluation errors carry the offending point") {
    CHECK_THROWS_AS(evaluate(parse("log(x)"), -1.0), eval_error);
    CHECK_THROWS_AS(evaluate(parse("sqrt(x)"), -4.0), eval_error);
    CHECK_THROWS_AS(evaluate(parse("1/x"), 0.0), eval_error);
    CHECK_THROWS_AS(evaluate(parse("x^0.5"), -1.0), eval_error);

    try {
        evaluate(parse("1/y"), 3.0, 0.0, 7.0);
        FAIL("expected eval_error");
    } catch (const eval_error& e) {
        CHECK(e.x() == doctest::Approx(3.0));
        CHECK(e.t() == doctest::Approx(7.0));
    }
}

TEST_CASE("unparse round-trips to an identical tree") {
    const char* sources[] = {
        "sin(pi*x)",
        "x^0.4",
        "2*x+1",
        "-x^2",
        "pow(x, -0.6)*cos(pi*x)",
        "pi^2*sin(pi*x) - 0.4*pi*x^(-0.6)*cos(pi*x)",
        "sqrt(abs(x-0.5))",
        "1 + t*(x - y/2)",
        "exp(-(x^2+y^2)/0.1)",
    };
    for (const char* src : sources) {
        Expression original = parse(src);
        Expression round = parse(unparse(original));
        CHECK(identical(original, round));
    }
}

TEST_CASE("unparse round-trips for random trees") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    std::uniform_int_distribution<int> pick(0, 9);

    // Random expression text generator over the supported grammar.
    std::function<std::string(int)> gen = [&](int depth) -> std::string {
        if (depth == 0) {
            switch (pick(rng) % 4) {
            case 0: return "x";
            case 1: return "y";
            case 2: return "pi";
            default: return std::to_string(value(rng));
            }
        }
        switch (pick(rng)) {
        case 0: return "(" + gen(depth - 1) + "+" + gen(depth - 1) + ")";
        case 1: return "(" + gen(depth - 1) + "-" + gen(depth - 1) + ")";
        case 2: return "(" + gen(depth - 1) + "*" + gen(depth - 1) + ")";
        case 3: return "(" + gen(depth - 1) + "/" + gen(depth - 1) + ")";
        case 4: return "sin(" + gen(depth - 1) + ")";
        case 5: return "cos(" + gen(depth - 1) + ")";
        case 6: return "(-" + gen(depth - 1) + ")";
        case 7: return "abs(" + gen(depth - 1) + ")";
        case 8: return "pow(" + gen(depth - 1) + "," + gen(depth - 1) + ")";
        default: return "(" + gen(depth - 1) + "^2)";
        }
    };
    for (int i = 0; i < 50; ++i) {
        Expression original = parse(gen(3));
        CHECK(identical(original, parse(unparse(original))));
    }
}

TEST_CASE("variable references are reported") {
    CHECK(references_variable(parse("sin(pi*x)"), 0));
    CHECK(!references_variable(parse("sin(pi*x)"), 2));
    CHECK(references_variable(parse("1+t"), 2));
}
