#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include <wsturm/errors.hpp>
#include <wsturm/field.hpp>
#include <wsturm/mesh.hpp>

using namespace wsturm;

TEST_CASE("nodal hat interpolates linearly") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 2);
    Eigen::VectorXd hat(3);
    hat << 0.0, 1.0, 0.0;
    ScalarField field = ScalarField::from_nodal(mesh, hat, true);

    CHECK(evaluate(field, {0.25, 0.0}, mesh) == doctest::Approx(0.5));
    CHECK(evaluate(field, {0.5, 0.0}, mesh) == doctest::Approx(1.0));
    CHECK(evaluate(field, {0.875, 0.0}, mesh) == doctest::Approx(0.25));
    // at a node: exactly that node's coefficient
    CHECK(evaluate(field, {1.0, 0.0}, mesh) == doctest::Approx(0.0));
}

TEST_CASE("expression fields evaluate directly") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 4);
    ScalarField field =
        ScalarField::from_expression([](double x, double) { return std::sin(M_PI * x); });
    CHECK(evaluate(field, {0.5, 0.0}, mesh) == doctest::Approx(1.0));
}

TEST_CASE("points outside the domain are rejected") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 4);
    ScalarField field = ScalarField::from_expression([](double, double) { return 1.0; });
    CHECK_THROWS_AS(evaluate(field, {1.5, 0.0}, mesh), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(field, {-0.1, 0.0}, mesh), std::invalid_argument);
    // within 1e-12 of the closure is allowed
    CHECK(evaluate(field, {1.0 + 1e-13, 0.0}, mesh) == doctest::Approx(1.0));

    Mesh square = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 2, 2);
    CHECK_THROWS_AS(evaluate(field, {0.5, 1.2}, square), std::invalid_argument);
    CHECK(evaluate(field, {0.5, 1.0}, square) == doctest::Approx(1.0));
}

TEST_CASE("nodal coefficient count must match the mesh") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 4);
    Eigen::VectorXd wrong(3);
    wrong.setZero();
    CHECK_THROWS_AS(ScalarField::from_nodal(mesh, wrong), std::invalid_argument);
}

TEST_CASE("zero_boundary demands exact zeros on the boundary") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 2);
    Eigen::VectorXd coeffs(3);
    coeffs << 0.1, 1.0, 0.0;
    CHECK_THROWS_AS(ScalarField::from_nodal(mesh, coeffs, true), std::invalid_argument);
    coeffs << 0.0, 1.0, 0.0;
    CHECK(ScalarField::from_nodal(mesh, coeffs, true).zero_boundary());
}

TEST_CASE("weight fields reject negative nodal coefficients") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 2);
    Eigen::VectorXd coeffs(3);
    coeffs << 0.5, -0.25, 0.5;
    CHECK_THROWS_AS(WeightField::from_nodal(mesh, coeffs), admissibility_error);
    coeffs << 0.5, 0.25, 0.5;
    CHECK(WeightField::from_nodal(mesh, coeffs).valid());
}

TEST_CASE("P1 interpolation reproduces affine functions") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);

    Mesh line = refine_uniform(build_interval_mesh(-1.0, 2.0, 3));
    Mesh square = refine_uniform(build_rectangle_mesh(0.0, 2.0, -1.0, 1.0, 2, 3));
    std::uniform_real_distribution<double> px(-1.0, 2.0);
    std::uniform_real_distribution<double> sx(0.0, 2.0), sy(-1.0, 1.0);

    for (int trial = 0; trial < 10; ++trial) {
        double a = coef(rng), b = coef(rng), c = coef(rng);
        auto affine = [=](double x, double y) { return a + b * x + c * y; };

        ScalarField on_line = interpolate(line, affine);
        for (int i = 0; i < 20; ++i) {
            double x = px(rng);
            CHECK(evaluate(on_line, {x, 0.0}, line) ==
                  doctest::Approx(affine(x, 0.0)).epsilon(1e-12));
        }
        ScalarField on_square = interpolate(square, affine);
        for (int i = 0; i < 20; ++i) {
            double x = sx(rng), y = sy(rng);
            CHECK(evaluate(on_square, {x, y}, square) ==
                  doctest::Approx(affine(x, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("interpolate can force boundary zeros") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 8);
    ScalarField f = interpolate(
        mesh, [](double x, double) { return std::sin(M_PI * x) + 1e-17; }, true);
    CHECK(f.zero_boundary());
    CHECK(f.coefficients()[0] == 0.0);
    CHECK(f.coefficients()[mesh.node_count() - 1] == 0.0);
}
