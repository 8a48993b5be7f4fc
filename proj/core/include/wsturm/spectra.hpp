#pragma once

#include <Eigen/Core>

#include "wsturm/assembly.hpp"
#include "wsturm/field.hpp"
#include "wsturm/integrals.hpp"

namespace wsturm {

/// Ascending prefix of the generalized eigen-sequence A e = lambda M e.
/// Vectors are columns of `vectors`, M-orthonormal in the reduced space.
struct EigenSequence {
    std::vector<double> values;
    Eigen::MatrixXd vectors;
    /// Worst relative eigen-residual ||A e - lambda M e|| / ||A e||.
    double max_residual = 0.0;
    /// lambda_k / lambda_1 exceeded 1e12.
    bool conditioning_warning = false;

    int count() const { return static_cast<int>(values.size()); }
};

struct EigenOptions {
    /// Use a dense generalized solver at or below this reduced size.
    int dense_threshold = 500;
    double residual_tol = 1e-9;
    int max_iterations = 500;
    unsigned seed = 0x5eedu;
};

/// k smallest generalized eigenpairs: dense fallback for small systems,
/// shift-invert subspace iteration with full reorthogonalization above.
EigenSequence solve_eigenpairs(const AssembledSystem& system, int k,
                               const EigenOptions& options = {});

/// Sharp discrete constant of ||u||_2 <= c ||grad u||_{2,n}: 1/sqrt(lambda_1).
double estimate_hardy_constant(const AssembledSystem& system, const EigenOptions& options = {});

/// Sharp discrete c with Q(u,u) >= c u^T(M+A)u: lambda_1 / (1 + lambda_1).
double estimate_coercivity_constant(const AssembledSystem& system,
                                    const EigenOptions& options = {});

struct PoincareOptions {
    int quadrature_degree = 4;
    int starts = 20;        ///< random starts of the q = 4/3 ascent
    int max_ascent_steps = 200;
    unsigned seed = 0x9e3779b9u;
};

struct PoincareEstimate {
    double q = 0.0;
    double constant = 0.0;
    /// q = 4/3: a sampled/ascent lower bound, not a sharp value.
    bool heuristic = false;
};

/// Best constant in ||u||_q <= c ||grad u||_q over the zero-trace P1
/// space. q = 2 has the eigenvalue characterization (unweighted system);
/// q = 4/3 is estimated by projected gradient ascent from random starts.
PoincareEstimate estimate_poincare_constant(const Mesh& mesh, double q,
                                            const PoincareOptions& options = {});

struct HolderCheck {
    /// False when ||n^-2||_1 diverges (the chain does not apply).
    bool applicable = false;
    bool holds = false;
    double lhs = 0.0;      ///< ||grad u||_{4/3}
    double rhs = 0.0;      ///< ||n^-2||_1^{1/4} ||grad u||_{2,n}
    double slack = 0.0;    ///< rhs - lhs
    double constant = 0.0; ///< ||n^-2||_1^{1/4}
};

/// Checks the embedding inequality with p = 2, q = 4/3, s = 2 for a
/// zero-boundary nodal field.
HolderCheck verify_holder_chain(const ScalarField& u, const WeightField& n, const Mesh& mesh,
                                const QuadratureRule& quad);

/// Every constant in the continuity/coercivity chain, measured on the
/// discrete space.
struct ConstantsReport {
    double poincare_q = 0.0;       ///< exponent the Poincare constant is for
    double poincare = 0.0;
    bool poincare_heuristic = false;
    double hardy = 0.0;
    double coercivity = 0.0;
    /// Largest sampled |Q(u,v)| / (||u||_{1,2,n} ||v||_{1,2,n}); the form
    /// is continuous with C = 1, so this never exceeds 1 up to round-off.
    double continuity = 0.0;
    double holder_embedding = 0.0; ///< ||n^-2||_1^{1/4}
    bool holder_applicable = false;
};

ConstantsReport estimate_constants(const Mesh& mesh, const WeightField& n,
                                   const QuadratureRule& quad, double poincare_q = 2.0,
                                   const EigenOptions& options = {});

} // namespace wsturm
