#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include <wsturm/mesh.hpp>

using namespace wsturm;

TEST_CASE("interval mesh: uniform bisection of (0,1)") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 2);
    REQUIRE(mesh.node_count() == 3);
    CHECK(mesh.nodes[0].x == doctest::Approx(0.0));
    CHECK(mesh.nodes[1].x == doctest::Approx(0.5));
    CHECK(mesh.nodes[2].x == doctest::Approx(1.0));
    CHECK(mesh.boundary_nodes == std::vector<int>{0, 2});
    validate_mesh(mesh);
}

TEST_CASE("interval mesh: measures are additive") {
    Mesh mesh = build_interval_mesh(0.0, 1.0, 4);
    for (double m : mesh.element_measures) CHECK(m == doctest::Approx(0.25));
    CHECK(mesh.total_measure() == doctest::Approx(1.0).epsilon(1e-12));

    Mesh wide = build_interval_mesh(-1.0, 1.0, 10);
    CHECK(wide.node_count() == 11);
    CHECK(wide.total_measure() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("interval mesh: rejects bad input") {
    CHECK_THROWS_AS(build_interval_mesh(1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_interval_mesh(2.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_interval_mesh(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("rectangle mesh: single cell") {
    Mesh mesh = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 1, 1);
    CHECK(mesh.element_count() == 2);
    CHECK(mesh.node_count() == 4);
    CHECK(mesh.boundary_nodes.size() == 4);
    validate_mesh(mesh);
}

TEST_CASE("rectangle mesh: 2x2 grid has one interior node") {
    Mesh mesh = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 2, 2);
    CHECK(mesh.element_count() == 8);
    CHECK(mesh.node_count() == 9);
    CHECK(mesh.boundary_nodes.size() == 8);
    int interior = 0;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (!mesh.is_boundary(i)) ++interior;
    CHECK(interior == 1);
    validate_mesh(mesh);
}

TEST_CASE("rectangle mesh: areas sum to the rectangle area") {
    for (auto [mx, my] : {std::pair{1, 1}, {3, 2}, {7, 5}}) {
        Mesh mesh = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, mx, my);
        CHECK(mesh.total_measure() == doctest::Approx(1.0).epsilon(1e-12));
        validate_mesh(mesh);
    }
    Mesh scaled = build_rectangle_mesh(-1.0, 3.0, 2.0, 2.5, 4, 3);
    CHECK(scaled.total_measure() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(build_rectangle_mesh(0.0, 0.0, 0.0, 1.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 0, 1), std::invalid_argument);
}

TEST_CASE("refinement bisects 1D elements") {
    Mesh coarse = build_interval_mesh(0.0, 1.0, 2);
    Mesh fine = refine_uniform(coarse);
    CHECK(fine.element_count() == 4);
    for (double m : fine.element_measures) CHECK(m == doctest::Approx(0.25));
    CHECK(fine.boundary_nodes.size() == 2);
    validate_mesh(fine);
}

TEST_CASE("refinement quadrisects triangles and preserves measure") {
    Mesh coarse = build_rectangle_mesh(0.0, 1.0, 0.0, 1.0, 1, 1);
    Mesh fine = refine_uniform(coarse);
    CHECK(fine.element_count() == 8);
    CHECK(fine.total_measure() == doctest::Approx(coarse.total_measure()).epsilon(1e-12));
    validate_mesh(fine);

    Mesh finer = refine_uniform(fine);
    CHECK(finer.element_count() == 32);
    CHECK(finer.total_measure() == doctest::Approx(1.0).epsilon(1e-12));
    validate_mesh(finer);

    // Boundary tags re-derived from connectivity match the rectangle edge.
    for (int i = 0; i < finer.node_count(); ++i) {
        const Point& p = finer.nodes[i];
        bool on_edge = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
        CHECK(finer.is_boundary(i) == on_edge);
    }
}

TEST_CASE("measure invariance across repeated refinement") {
    Mesh mesh = build_interval_mesh(-2.0, 5.0, 3);
    double total = mesh.total_measure();
    for (int r = 0; r < 4; ++r) {
        mesh = refine_uniform(mesh);
        CHECK(std::abs(mesh.total_measure() - total) <= 1e-12 * total);
    }
}
