#include "wsturm/solve.hpp"

#include <cmath>
#include <random>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "wsturm/errors.hpp"

namespace wsturm {

namespace {

double relative_residual(const AssembledSystem& sys, const Eigen::VectorXd& x) {
    double bnorm = sys.load.norm();
    double rnorm = (sys.stiffness * x - sys.load).norm();
    return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

Eigen::VectorXd expand(const AssembledSystem& sys, const Eigen::VectorXd& reduced) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(sys.node_count);
    for (int r = 0; r < sys.size(); ++r) full[sys.interior_dofs[r]] = reduced[r];
    return full;
}

// Cheap power-iteration estimates of the extreme eigenvalues of the
// reduced stiffness, reusing the factorization for the small end.
bool poorly_conditioned(const AssembledSystem& sys,
                        const Eigen::SimplicialLLT<SparseMatrix>& llt) {
    int n = sys.size();
    if (n == 0) return false;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double lo = 1.0, hi = 1.0;
    for (int it = 0; it < 12; ++it) {
        v = sys.stiffness * v;
        hi = v.norm();
        if (hi == 0.0) return false;
        v /= hi;
    }
    Eigen::VectorXd w = Eigen::VectorXd::Ones(n).normalized();
    for (int it = 0; it < 12; ++it) {
        w = llt.solve(w);
        double norm = w.norm();
        if (norm == 0.0) return false;
        lo = 1.0 / norm;
        w /= norm;
    }
    return hi / lo > 1e12;
}

} // namespace

WeakSolution solve_weak(const AssembledSystem& system) {
    if (system.size() == 0) throw solver_error("solve_weak: empty system");

    Eigen::SimplicialLLT<SparseMatrix> llt(system.stiffness);
    if (llt.info() != Eigen::Success)
        throw solver_error(
            "solve_weak: stiffness factorization failed (matrix not positive definite); "
            "check the density admissibility certificate (n >= 0, n in L1, n^-2 in L1)");

    Eigen::VectorXd x = llt.solve(system.load);
    // A couple of refinement sweeps keep the Galerkin residual at the
    // 1e-10 contract even for degenerate weights.
    for (int sweep = 0; sweep < 3 && relative_residual(system, x) > 1e-12; ++sweep)
        x += llt.solve(system.load - system.stiffness * x);

    WeakSolution out;
    out.reduced = std::move(x);
    out.full = expand(system, out.reduced);
    out.residual = relative_residual(system, out.reduced);
    if (out.residual > 1e-10)
        throw solver_error("solve_weak: residual " + std::to_string(out.residual) +
                           " exceeds the 1e-10 contract");
    out.conditioning_warning = poorly_conditioned(system, llt);
    return out;
}

WeakSolution solve_weak_cg(const AssembledSystem& system, unsigned seed) {
    if (system.size() == 0) throw solver_error("solve_weak_cg: empty system");

    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(10 * system.size());
    cg.compute(system.stiffness);

    std::mt19937 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd guess(system.size());
    for (int i = 0; i < system.size(); ++i) guess[i] = normal(rng);

    Eigen::VectorXd x = cg.solveWithGuess(system.load, guess);
    if (cg.info() != Eigen::Success)
        throw solver_error("solve_weak_cg: no convergence within the iteration cap");

    WeakSolution out;
    out.reduced = std::move(x);
    out.full = expand(system, out.reduced);
    out.residual = relative_residual(system, out.reduced);
    return out;
}

double energy(const AssembledSystem& system, const Eigen::VectorXd& reduced) {
    if (reduced.size() != system.size())
        throw std::invalid_argument("energy: dimension mismatch");
    return 0.5 * reduced.dot(system.stiffness * reduced) - system.load.dot(reduced);
}

} // namespace wsturm
