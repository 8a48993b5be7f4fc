#pragma once

#include "wsturm/assembly.hpp"
#include "wsturm/field.hpp"

namespace wsturm {

struct WeakSolution {
    /// Full nodal coefficients, boundary entries exactly zero. Wrap with
    /// to_full_field() to evaluate as a ScalarField.
    Eigen::VectorXd full;
    /// Interior coefficients (the actual solve unknowns).
    Eigen::VectorXd reduced;
    /// ||A v - b|| / ||b|| (absolute when b = 0).
    double residual = 0.0;
    /// Extreme-eigenvalue estimate of the reduced stiffness exceeded 1e12.
    bool conditioning_warning = false;
};

/// Direct sparse Cholesky solve of the reduced system; the reference
/// path. Indefiniteness or factorization failure raises solver_error
/// pointing at the admissibility certificate.
WeakSolution solve_weak(const AssembledSystem& system);

/// Conjugate-gradient solve from a random seeded start; the secondary
/// path used to cross-check uniqueness. Relative residual 1e-12, at most
/// 10 * size iterations.
WeakSolution solve_weak_cg(const AssembledSystem& system, unsigned seed = 1u);

/// The quadratic energy J(v) = 1/2 v^T A v - b^T v, minimized by the weak
/// solution.
double energy(const AssembledSystem& system, const Eigen::VectorXd& reduced);

} // namespace wsturm
