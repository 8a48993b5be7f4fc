#pragma once

#include <optional>
#include <vector>

#include "wsturm/assembly.hpp"
#include "wsturm/field.hpp"
#include "wsturm/integrals.hpp"
#include "wsturm/solve.hpp"
#include "wsturm/spectra.hpp"

namespace wsturm {

/// The three membership conditions of the admissible density set:
/// n >= 0, n in L1, n^-2 in L1.
struct DensityCertificate {
    bool nonnegative = false;
    double min_sample = 0.0; ///< smallest weight value seen at any sample point
    IntegralEstimate l1;
    IntegrabilityReport inverse_square;

    bool admissible() const {
        return nonnegative && !l1.divergent && !inverse_square.divergent;
    }
};

/// Evaluates the three conditions. Failures are reported flags, never
/// exceptions: boundary cases of the admissible set are exactly what the
/// diagnostics exist to observe.
DensityCertificate certify_density(const WeightField& n, const Mesh& mesh,
                                   const QuadratureRule& quad);

/// One time slice of the linearized problem: density, inhomogeneity, and
/// the optional section-5 diagnostic data.
struct SliceProblem {
    double t = 0.0;
    WeightField density;
    ScalarField load;
    /// Per-component time derivative of the current (empty when absent).
    std::vector<ScalarField> current_rate;
    /// Divergence of the internal forces, supplied as data.
    std::optional<ScalarField> internal_force;
};

struct SliceReport {
    double t = 0.0;
    DensityCertificate certificate;
    bool solved = false;
    /// Full nodal potential; empty when the certificate failed.
    Eigen::VectorXd potential;
    double solve_residual = 0.0;
    double lambda1 = 0.0;
    double hardy = 0.0;
    std::optional<ForceIntegral> force;
    std::optional<WeizsackerTerm> weizsacker;
    /// ||zeta - (q - d2n/dt2)||_2 when q and both neighbors are available.
    std::optional<double> consistency_residual;
    bool consistency_ok = true;
    bool conditioning_warning = false;
};

struct SliceOptions {
    int quadrature_degree = 4;
    EigenOptions eigen;
    /// Acceptance threshold for ||zeta - (q - d2n/dt2)||_2 / (1 + ||zeta||_2).
    double consistency_tol = 1e-8;
};

/// Central second difference (prev - 2 curr + next) / dt^2 as a nodal
/// field; expression-form inputs are interpolated first.
ScalarField second_time_difference(const WeightField& prev, const WeightField& curr,
                                   const WeightField& next, double dt, const Mesh& mesh);

/// Certify, solve and diagnose every slice on a shared mesh. A failed
/// certificate skips the solve for that slice but never aborts the
/// series; reports come back in input order.
std::vector<SliceReport> run_time_series(const std::vector<SliceProblem>& slices,
                                         const Mesh& mesh, const SliceOptions& options = {});

} // namespace wsturm
