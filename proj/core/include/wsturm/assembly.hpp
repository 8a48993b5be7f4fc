#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "wsturm/field.hpp"
#include "wsturm/mesh.hpp"
#include "wsturm/quadrature.hpp"

namespace wsturm {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete counterparts of the weighted energy form, the L2 pairing and
/// the load functional, reduced to the interior (zero-trace) unknowns.
struct AssembledSystem {
    SparseMatrix stiffness; ///< reduced; exactly symmetric
    SparseMatrix mass;      ///< reduced; exactly symmetric, positive definite
    Eigen::VectorXd load;   ///< reduced
    /// Reduced index -> mesh node index.
    std::vector<int> interior_dofs;
    int node_count = 0;
    /// The weight the stiffness was assembled with.
    WeightField weight_snapshot;

    int size() const { return static_cast<int>(interior_dofs.size()); }
};

/// Full-space stiffness A_ij = int n grad(phi_i) . grad(phi_j). The weight
/// is evaluated at every quadrature point; a negative value raises
/// admissibility_error.
SparseMatrix assemble_stiffness(const Mesh& mesh, const WeightField& n,
                                const QuadratureRule& quad);

/// Full-space mass M_ij = int phi_i phi_j.
SparseMatrix assemble_mass(const Mesh& mesh, const QuadratureRule& quad);

/// Full-space load b_i = int phi_i zeta. Elements where plain quadrature
/// has not converged are refined by bisection toward the rough spot;
/// loads that keep growing under refinement raise divergence_error.
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& zeta,
                              const QuadratureRule& quad);

/// Removes boundary rows/columns and records the interior index map.
AssembledSystem apply_dirichlet(const SparseMatrix& stiffness, const SparseMatrix& mass,
                                const Eigen::VectorXd& load, const Mesh& mesh);

/// assemble_* plus apply_dirichlet, with the weight snapshot attached.
AssembledSystem assemble_system(const Mesh& mesh, const WeightField& n,
                                const ScalarField& zeta, const QuadratureRule& quad);

/// Reinserts boundary zeros around a reduced coefficient vector.
ScalarField to_full_field(const AssembledSystem& system, const Mesh& mesh,
                          const Eigen::VectorXd& reduced);

/// Writes "row col value" triples, one per line, 17 significant digits,
/// in column-major sorted order.
void write_coordinate_format(const SparseMatrix& matrix, std::ostream& os);

} // namespace wsturm
