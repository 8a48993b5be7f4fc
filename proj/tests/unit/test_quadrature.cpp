#include <doctest.h>

#include <cmath>

#include <wsturm/mesh.hpp>
#include <wsturm/quadrature.hpp>

using namespace wsturm;

namespace {

// Independent closed forms used as quadrature oracles.

double interval_monomial(double a, double b, int k) {
    return (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// int_T x^k y^l over a triangle, via the multinomial expansion of the
// barycentric representation and int_T l1^a l2^b l3^c = 2|T| a!b!c!/(a+b+c+2)!.
double triangle_monomial(const Point& p0, const Point& p1, const Point& p2, int k, int l) {
    double area =
        0.5 * std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    double xs[3] = {p0.x, p1.x, p2.x};
    double ys[3] = {p0.y, p1.y, p2.y};
    double total = 0.0;
    for (int k1 = 0; k1 <= k; ++k1)
        for (int k2 = 0; k2 + k1 <= k; ++k2) {
            int k3 = k - k1 - k2;
            double ck = factorial(k) / (factorial(k1) * factorial(k2) * factorial(k3));
            double xpow = std::pow(xs[0], k1) * std::pow(xs[1], k2) * std::pow(xs[2], k3);
            for (int l1 = 0; l1 <= l; ++l1)
                for (int l2 = 0; l2 + l1 <= l; ++l2) {
                    int l3 = l - l1 - l2;
                    double cl =
                        factorial(l) / (factorial(l1) * factorial(l2) * factorial(l3));
                    double ypow =
                        std::pow(ys[0], l1) * std::pow(ys[1], l2) * std::pow(ys[2], l3);
                    int a = k1 + l1, b = k2 + l2, c = k3 + l3;
                    double moment = 2.0 * area * factorial(a) * factorial(b) * factorial(c) /
                                    factorial(a + b + c + 2);
                    total += ck * cl * xpow * ypow * moment;
                }
        }
    return total;
}

double apply_interval(const QuadratureRule& rule, double a, double b, int k) {
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q)
        acc += rule.weights[q] * std::pow(a + rule.points[q].x * (b - a), k);
    return acc * (b - a);
}

double apply_triangle(const QuadratureRule& rule, const Point& p0, const Point& p1,
                      const Point& p2, int k, int l) {
    double area =
        0.5 * std::abs((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        double xi = rule.points[q].x, eta = rule.points[q].y;
        double x = p0.x + xi * (p1.x - p0.x) + eta * (p2.x - p0.x);
        double y = p0.y + xi * (p1.y - p0.y) + eta * (p2.y - p0.y);
        acc += rule.weights[q] * std::pow(x, k) * std::pow(y, l);
    }
    return acc * 2.0 * area;
}

} // namespace

TEST_CASE("interval rules: weights sum to the reference measure") {
    for (int degree = 0; degree <= 12; ++degree) {
        QuadratureRule rule = interval_rule(degree);
        double sum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("triangle rules: weights sum to the reference measure") {
    for (int degree = 0; degree <= 10; ++degree) {
        QuadratureRule rule = triangle_rule(degree);
        double sum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("interval rules are exact for monomials up to their degree") {
    for (int degree : {1, 2, 3, 4, 5, 8}) {
        QuadratureRule rule = interval_rule(degree);
        for (auto [a, b] : {std::pair{0.0, 1.0}, {-1.0, 2.5}, {0.25, 0.3125}}) {
            for (int k = 0; k <= degree; ++k) {
                double exact = interval_monomial(a, b, k);
                double approx = apply_interval(rule, a, b, k);
                CHECK(approx == doctest::Approx(exact).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("triangle rules are exact for monomials up to their degree") {
    const Point ref0{0.0, 0.0}, ref1{1.0, 0.0}, ref2{0.0, 1.0};
    const Point g0{0.2, -0.3}, g1{1.7, 0.1}, g2{0.4, 1.9};
    for (int degree : {1, 2, 3, 4, 6}) {
        QuadratureRule rule = triangle_rule(degree);
        for (int k = 0; k <= degree; ++k)
            for (int l = 0; k + l <= degree; ++l) {
                double exact_ref = triangle_monomial(ref0, ref1, ref2, k, l);
                CHECK(apply_triangle(rule, ref0, ref1, ref2, k, l) ==
                      doctest::Approx(exact_ref).epsilon(1e-12));
                double exact_gen = triangle_monomial(g0, g1, g2, k, l);
                CHECK(apply_triangle(rule, g0, g1, g2, k, l) ==
                      doctest::Approx(exact_gen).epsilon(1e-12));
            }
    }
}

TEST_CASE("default rule dispatches on dimension") {
    CHECK(default_rule(1).dim == 1);
    CHECK(default_rule(2).dim == 2);
    CHECK(default_rule(1).exactness_degree == 4);
    CHECK_THROWS(default_rule(3));
}
