#pragma once

#include <vector>

#include "wsturm/mesh.hpp"

namespace wsturm {

/// Reference-element quadrature. 1D rules live on [0,1] (weights sum to 1),
/// triangle rules on the unit triangle {x,y >= 0, x+y <= 1} (weights sum
/// to 1/2). `exactness_degree` is the highest polynomial degree integrated
/// exactly.
struct QuadratureRule {
    int dim = 1;
    int exactness_degree = 0;
    std::vector<Point> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule on [0,1] exact for the given polynomial degree.
QuadratureRule interval_rule(int degree);

/// Duffy-collapsed tensor Gauss rule on the unit triangle, exact for the
/// given total degree.
QuadratureRule triangle_rule(int degree);

/// Dispatch on dimension. Degree 4 is the project-wide default.
QuadratureRule default_rule(int dim, int degree = 4);

} // namespace wsturm
