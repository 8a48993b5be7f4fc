#pragma once

#include <vector>

#include "wsturm/field.hpp"
#include "wsturm/mesh.hpp"
#include "wsturm/quadrature.hpp"

namespace wsturm {

/// Outcome of estimating the integral of n^(-s). `value` is +infinity and
/// meaningless when `divergent` is set.
struct IntegrabilityReport {
    double s = 0.0;
    double value = 0.0;
    bool divergent = false;
    /// false: plain element-wise quadrature everywhere; true: geometric
    /// sub-refinement toward zeros of the weight was engaged.
    bool singularity_adapted = false;
    double estimated_error = 0.0;

    bool finite() const { return !divergent; }
};

/// Generic integral estimate with divergence detection (L1 norms of
/// possibly unbounded densities).
struct IntegralEstimate {
    double value = 0.0;
    bool divergent = false;
    double estimated_error = 0.0;
    bool singularity_adapted = false;
};

/// Both sides of the kinetic-energy identity
///   int |grad sqrt(n)|^2 = 1/4 int |grad n|^2 / n,
/// each computed by its own quadrature route.
struct WeizsackerTerm {
    double lhs = 0.0;
    double rhs = 0.0;
    bool lhs_divergent = false;
    bool rhs_divergent = false;
};

/// int |dj|^2 / n with divergence flag.
struct ForceIntegral {
    double value = 0.0;
    bool divergent = false;
};

/// Estimates int n^(-s) dx, s > 0. Elements where the weight vanishes at a
/// vertex (or at a quadrature point) are integrated by geometric shell
/// refinement of ratio 2 toward the zero, up to 40 levels; the shell sums
/// are extrapolated geometrically, and divergence is declared when the
/// last shell increments stop decaying. Divergence is a report outcome,
/// never an exception.
IntegrabilityReport check_inverse_integrability(const WeightField& n, double s, const Mesh& mesh,
                                                const QuadratureRule& quad);

/// int n dx with the same divergence detection (the weight itself may be
/// given as an unbounded expression).
IntegralEstimate weight_l1_norm(const WeightField& n, const Mesh& mesh,
                                const QuadratureRule& quad);

/// Evaluates both sides of the Weizsacker identity. Expression-form
/// weights are differentiated by central finite differences at the
/// quadrature points (projecting onto P1 first would turn the boundary
/// zeros of smooth densities into artificial log-divergences of the
/// right-hand side); nodal weights use their element-wise P1 gradients.
WeizsackerTerm weizsacker_term(const WeightField& n, const Mesh& mesh,
                               const QuadratureRule& quad);

/// int |dj|^2 / n for the per-component time derivative of the current,
/// with singularity-adapted quadrature where n vanishes.
ForceIntegral force_integral(const std::vector<ScalarField>& dj, const WeightField& n,
                             const Mesh& mesh, const QuadratureRule& quad);

} // namespace wsturm
