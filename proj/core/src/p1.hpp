#pragma once

// Internal P1 element helpers shared by the integration and assembly code.

#include <array>
#include <cmath>
#include <string>

#include "wsturm/errors.hpp"
#include "wsturm/field.hpp"
#include "wsturm/mesh.hpp"
#include "wsturm/quadrature.hpp"

namespace wsturm::detail {

// Negative weight values above this magnitude are admissibility
// violations; smaller ones are round-off and clamp to zero.
inline constexpr double kWeightNegativeTol = 1e-12;

// Weight values below this are treated as vanishing (below the round-off
// resolution of double-precision quadrature).
inline constexpr double kWeightVanishTol = 1e-14;

// Barycentric coordinates of a reference quadrature point: 1D (xi) ->
// (1-xi, xi, 0); 2D (xi, eta) -> (1-xi-eta, xi, eta).
inline std::array<double, 3> reference_barycentric(int dim, Point ref) {
    if (dim == 1) return {1.0 - ref.x, ref.x, 0.0};
    return {1.0 - ref.x - ref.y, ref.x, ref.y};
}

inline Point map_to_element(const Mesh& mesh, int e, Point ref) {
    const auto& el = mesh.elements[e];
    const Point& p0 = mesh.nodes[el[0]];
    const Point& p1 = mesh.nodes[el[1]];
    if (mesh.dim == 1) return {p0.x + ref.x * (p1.x - p0.x), 0.0};
    const Point& p2 = mesh.nodes[el[2]];
    return {p0.x + ref.x * (p1.x - p0.x) + ref.y * (p2.x - p0.x),
            p0.y + ref.x * (p1.y - p0.y) + ref.y * (p2.y - p0.y)};
}

// Physical-to-barycentric for a triangle.
inline std::array<double, 3> barycentric(const Mesh& mesh, int e, Point p) {
    const auto& el = mesh.elements[e];
    const Point& a = mesh.nodes[el[0]];
    const Point& b = mesh.nodes[el[1]];
    const Point& c = mesh.nodes[el[2]];
    double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    return {1.0 - l1 - l2, l1, l2};
}

// Constant gradients of the P1 shape functions on element e. In 1D only
// the x component is used.
inline std::array<Point, 3> shape_gradients(const Mesh& mesh, int e) {
    const auto& el = mesh.elements[e];
    if (mesh.dim == 1) {
        double h = mesh.nodes[el[1]].x - mesh.nodes[el[0]].x;
        return {Point{-1.0 / h, 0.0}, Point{1.0 / h, 0.0}, Point{0.0, 0.0}};
    }
    const Point& a = mesh.nodes[el[0]];
    const Point& b = mesh.nodes[el[1]];
    const Point& c = mesh.nodes[el[2]];
    double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    return {Point{(b.y - c.y) / det, (c.x - b.x) / det},
            Point{(c.y - a.y) / det, (a.x - c.x) / det},
            Point{(a.y - b.y) / det, (b.x - a.x) / det}};
}

// Gradient of a nodal field on element e (constant).
inline Point p1_gradient(const Mesh& mesh, const Eigen::VectorXd& coeffs, int e) {
    auto grads = shape_gradients(mesh, e);
    const auto& el = mesh.elements[e];
    Point g{0.0, 0.0};
    for (int k = 0; k < mesh.nodes_per_element(); ++k) {
        g.x += coeffs[el[k]] * grads[k].x;
        g.y += coeffs[el[k]] * grads[k].y;
    }
    return g;
}

inline double p1_value(const Mesh& mesh, const Eigen::VectorXd& coeffs, int e,
                       const std::array<double, 3>& bary) {
    const auto& el = mesh.elements[e];
    double v = 0.0;
    for (int k = 0; k < mesh.nodes_per_element(); ++k) v += bary[k] * coeffs[el[k]];
    return v;
}

// Field value at a quadrature point of element e; `bary` and `physical`
// must describe the same point.
inline double field_value(const ScalarField& f, const Mesh& mesh, int e,
                          const std::array<double, 3>& bary, Point physical) {
    if (f.is_nodal()) return p1_value(mesh, f.coefficients(), e, bary);
    return f.expression_value(physical.x, physical.y);
}

// Weight evaluation with the sign policy: clamp round-off negatives,
// throw on anything clearly below zero.
inline double admissible_weight_value(const WeightField& n, const Mesh& mesh, int e,
                                      const std::array<double, 3>& bary, Point physical) {
    double v = field_value(n.field(), mesh, e, bary, physical);
    if (v < -kWeightNegativeTol)
        throw admissibility_error("weight is negative at (" + std::to_string(physical.x) +
                                  ", " + std::to_string(physical.y) + ")");
    return v < 0.0 ? 0.0 : v;
}

// Scale factor from reference weights to element integrals.
inline double jacobian_scale(const Mesh& mesh, int e) {
    return mesh.dim == 1 ? mesh.element_measures[e] : 2.0 * mesh.element_measures[e];
}

inline double element_diameter(const Mesh& mesh, int e) {
    const auto& el = mesh.elements[e];
    auto dist = [](const Point& p, const Point& q) {
        return std::hypot(p.x - q.x, p.y - q.y);
    };
    if (mesh.dim == 1) return dist(mesh.nodes[el[0]], mesh.nodes[el[1]]);
    return std::max({dist(mesh.nodes[el[0]], mesh.nodes[el[1]]),
                     dist(mesh.nodes[el[1]], mesh.nodes[el[2]]),
                     dist(mesh.nodes[el[2]], mesh.nodes[el[0]])});
}

} // namespace wsturm::detail
