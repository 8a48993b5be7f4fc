#pragma once

#include "wsturm/field.hpp"
#include "wsturm/mesh.hpp"
#include "wsturm/quadrature.hpp"

namespace wsturm {

// The four norm families, all for general p in [1, 16] (quadrature is
// meaningless at double precision for larger exponents):
//
//   lp_norm               (int |u|^p)^(1/p)
//   weighted_lp_norm      (int |u|^p n)^(1/p)
//   gradient_norm         (int |grad u|^p)^(1/p)        and the n-weighted variant
//   weighted_sobolev_norm (lp_norm^p + gradient_norm_{p,n}^p)^(1/p)
//
// Gradient-based norms require nodal form (P1 gradients are element-wise
// constant); interpolate() expression fields first.

double lp_norm(const ScalarField& u, double p, const Mesh& mesh, const QuadratureRule& quad);

double weighted_lp_norm(const ScalarField& u, double p, const WeightField& n, const Mesh& mesh,
                        const QuadratureRule& quad);

double gradient_norm(const ScalarField& u, double p, const Mesh& mesh,
                     const QuadratureRule& quad);

double gradient_norm(const ScalarField& u, double p, const WeightField& n, const Mesh& mesh,
                     const QuadratureRule& quad);

double weighted_sobolev_norm(const ScalarField& u, double p, const WeightField& n,
                             const Mesh& mesh, const QuadratureRule& quad);

} // namespace wsturm
