#include "wsturm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "wsturm/errors.hpp"
#include "wsturm/norms.hpp"
#include "p1.hpp"

namespace wsturm {

namespace {

double eigen_residual(const AssembledSystem& sys, double lambda, const Eigen::VectorXd& e) {
    Eigen::VectorXd ae = sys.stiffness * e;
    double denom = ae.norm();
    if (denom == 0.0) return 0.0;
    return (ae - lambda * (sys.mass * e)).norm() / denom;
}

// Modified Gram-Schmidt in the M inner product, run twice.
void m_orthonormalize(const AssembledSystem& sys, Eigen::MatrixXd& x, std::mt19937& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < x.cols(); ++j) {
            Eigen::VectorXd mj = sys.mass * x.col(j);
            for (int i = 0; i < j; ++i) {
                double r = x.col(i).dot(mj);
                x.col(j) -= r * x.col(i);
                mj = sys.mass * x.col(j);
            }
            double norm = std::sqrt(x.col(j).dot(mj));
            if (!(norm > 1e-150)) {
                // Breakdown: replace by a fresh random direction.
                for (int r = 0; r < x.rows(); ++r) x(r, j) = normal(rng);
                mj = sys.mass * x.col(j);
                norm = std::sqrt(x.col(j).dot(mj));
            }
            x.col(j) /= norm;
        }
    }
}

EigenSequence dense_eigenpairs(const AssembledSystem& sys, int k) {
    Eigen::MatrixXd a = Eigen::MatrixXd(sys.stiffness);
    Eigen::MatrixXd m = Eigen::MatrixXd(sys.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, m);
    if (solver.info() != Eigen::Success)
        throw solver_error("solve_eigenpairs: dense generalized eigensolver failed");

    EigenSequence seq;
    seq.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + k);
    seq.vectors = solver.eigenvectors().leftCols(k);
    for (int i = 0; i < k; ++i)
        seq.max_residual = std::max(seq.max_residual,
                                    eigen_residual(sys, seq.values[i], seq.vectors.col(i)));
    return seq;
}

EigenSequence iterative_eigenpairs(const AssembledSystem& sys, int k,
                                   const EigenOptions& options) {
    int n = sys.size();
    int block = std::min(n, k + std::max(8, k));

    Eigen::SimplicialLLT<SparseMatrix> llt(sys.stiffness);
    if (llt.info() != Eigen::Success)
        throw solver_error(
            "solve_eigenpairs: stiffness factorization failed (matrix not positive "
            "definite); check the density admissibility certificate");

    std::mt19937 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, block);
    for (int j = 0; j < block; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = normal(rng);
    m_orthonormalize(sys, x, rng);

    EigenSequence seq;
    double worst = std::numeric_limits<double>::infinity();
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        // Shift-invert power step at sigma = 0 followed by Rayleigh-Ritz.
        Eigen::MatrixXd y = llt.solve(sys.mass * x);
        m_orthonormalize(sys, y, rng);
        Eigen::MatrixXd reduced = y.transpose() * (sys.stiffness * y);
        reduced = 0.5 * (reduced + reduced.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(reduced);
        if (ritz.info() != Eigen::Success)
            throw solver_error("solve_eigenpairs: Rayleigh-Ritz projection failed");
        x = y * ritz.eigenvectors();

        worst = 0.0;
        for (int i = 0; i < k; ++i)
            worst = std::max(worst, eigen_residual(sys, ritz.eigenvalues()[i], x.col(i)));
        if (worst <= options.residual_tol) {
            seq.values.assign(ritz.eigenvalues().data(), ritz.eigenvalues().data() + k);
            seq.vectors = x.leftCols(k);
            seq.max_residual = worst;
            return seq;
        }
    }
    throw solver_error("solve_eigenpairs: no convergence after " +
                       std::to_string(options.max_iterations) +
                       " iterations (worst relative residual " + std::to_string(worst) + ")");
}

Eigen::VectorXd scatter(const Mesh& mesh, const std::vector<int>& interior,
                        const Eigen::VectorXd& reduced) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(mesh.node_count());
    for (std::size_t r = 0; r < interior.size(); ++r) full[interior[r]] = reduced[r];
    return full;
}

// d/du_i of int |u|^q and of int |grad u|^q for a nodal field; used by
// the q = 4/3 ascent.
struct RatioGradient {
    double value_norm_pow;    // int |u|^q
    double gradient_norm_pow; // int |grad u|^q
    Eigen::VectorXd d_value;
    Eigen::VectorXd d_gradient;
};

RatioGradient ratio_parts(const Mesh& mesh, const QuadratureRule& quad, double q,
                          const Eigen::VectorXd& full) {
    RatioGradient out;
    out.value_norm_pow = 0.0;
    out.gradient_norm_pow = 0.0;
    out.d_value = Eigen::VectorXd::Zero(mesh.node_count());
    out.d_gradient = Eigen::VectorXd::Zero(mesh.node_count());

    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        double scale = detail::jacobian_scale(mesh, e);
        for (int k = 0; k < quad.size(); ++k) {
            auto bary = detail::reference_barycentric(mesh.dim, quad.points[k]);
            double u = detail::p1_value(mesh, full, e, bary);
            double au = std::abs(u);
            out.value_norm_pow += scale * quad.weights[k] * std::pow(au, q);
            if (au > 1e-300) {
                double d = q * std::pow(au, q - 1.0) * (u > 0.0 ? 1.0 : -1.0);
                for (int c = 0; c < mesh.nodes_per_element(); ++c)
                    out.d_value[el[c]] += scale * quad.weights[k] * d * bary[c];
            }
        }

        Point g = detail::p1_gradient(mesh, full, e);
        double mag = mesh.dim == 1 ? std::abs(g.x) : std::hypot(g.x, g.y);
        out.gradient_norm_pow += mesh.element_measures[e] * std::pow(mag, q);
        if (mag > 1e-300) {
            auto grads = detail::shape_gradients(mesh, e);
            double d = q * std::pow(mag, q - 2.0);
            for (int c = 0; c < mesh.nodes_per_element(); ++c)
                out.d_gradient[el[c]] += mesh.element_measures[e] * d *
                                         (g.x * grads[c].x + g.y * grads[c].y);
        }
    }
    return out;
}

} // namespace

EigenSequence solve_eigenpairs(const AssembledSystem& system, int k,
                               const EigenOptions& options) {
    if (k < 1) throw std::invalid_argument("solve_eigenpairs: k must be >= 1");
    if (k > system.size())
        throw std::invalid_argument("solve_eigenpairs: k exceeds the interior DOF count");

    EigenSequence seq = system.size() <= options.dense_threshold
                            ? dense_eigenpairs(system, k)
                            : iterative_eigenpairs(system, k, options);
    if (!seq.values.empty() && seq.values.front() > 0.0)
        seq.conditioning_warning = seq.values.back() / seq.values.front() > 1e12;
    return seq;
}

double estimate_hardy_constant(const AssembledSystem& system, const EigenOptions& options) {
    EigenSequence seq = solve_eigenpairs(system, 1, options);
    double lambda1 = seq.values.front();
    if (!(lambda1 > 0.0))
        throw solver_error("estimate_hardy_constant: nonpositive smallest eigenvalue");
    return 1.0 / std::sqrt(lambda1);
}

double estimate_coercivity_constant(const AssembledSystem& system, const EigenOptions& options) {
    EigenSequence seq = solve_eigenpairs(system, 1, options);
    double lambda1 = seq.values.front();
    if (!(lambda1 > 0.0))
        throw solver_error("estimate_coercivity_constant: nonpositive smallest eigenvalue");
    return lambda1 / (1.0 + lambda1);
}

PoincareEstimate estimate_poincare_constant(const Mesh& mesh, double q,
                                            const PoincareOptions& options) {
    PoincareEstimate out;
    out.q = q;

    QuadratureRule quad = default_rule(mesh.dim, options.quadrature_degree);
    if (std::abs(q - 2.0) < 1e-12) {
        WeightField unit = WeightField::from_expression([](double, double) { return 1.0; });
        ScalarField zero = ScalarField::from_expression([](double, double) { return 0.0; });
        AssembledSystem sys = assemble_system(mesh, unit, zero, quad);
        EigenSequence seq = solve_eigenpairs(sys, 1);
        out.constant = 1.0 / std::sqrt(seq.values.front());
        return out;
    }
    if (std::abs(q - 4.0 / 3.0) > 1e-9)
        throw std::invalid_argument("estimate_poincare_constant: q must be 2 or 4/3");

    out.heuristic = true;
    std::vector<int> interior;
    for (int i = 0; i < mesh.node_count(); ++i)
        if (!mesh.is_boundary(i)) interior.push_back(i);
    if (interior.empty())
        throw error("estimate_poincare_constant: mesh has no interior nodes");

    std::mt19937 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto ratio = [&](const Eigen::VectorXd& full, const RatioGradient& parts) {
        return std::pow(parts.value_norm_pow, 1.0 / q) /
               std::pow(parts.gradient_norm_pow, 1.0 / q);
    };

    double best = 0.0;
    int productive_starts = 0;
    for (int start = 0; start < options.starts; ++start) {
        Eigen::VectorXd reduced(interior.size());
        for (auto& v : reduced) v = normal(rng);
        Eigen::VectorXd full = scatter(mesh, interior, reduced);
        RatioGradient parts = ratio_parts(mesh, quad, q, full);
        if (!(parts.gradient_norm_pow > 0.0)) continue;
        double r = ratio(full, parts);

        double step = 1.0;
        for (int it = 0; it < options.max_ascent_steps; ++it) {
            // Gradient of N/D with N = (int |u|^q)^(1/q), D likewise.
            double nval = std::pow(parts.value_norm_pow, 1.0 / q);
            double dval = std::pow(parts.gradient_norm_pow, 1.0 / q);
            Eigen::VectorXd dn =
                (nval / (q * parts.value_norm_pow)) * parts.d_value;
            Eigen::VectorXd dd =
                (dval / (q * parts.gradient_norm_pow)) * parts.d_gradient;
            Eigen::VectorXd grad_full = (dn * dval - nval * dd) / (dval * dval);

            Eigen::VectorXd grad(interior.size());
            for (std::size_t i = 0; i < interior.size(); ++i) grad[i] = grad_full[interior[i]];
            double gnorm = grad.norm();
            if (gnorm <= 1e-14 * (1.0 + std::abs(r))) break;

            bool improved = false;
            for (int bt = 0; bt < 25 && !improved; ++bt) {
                Eigen::VectorXd trial = reduced + (step / gnorm) * grad;
                trial.normalize();
                Eigen::VectorXd trial_full = scatter(mesh, interior, trial);
                RatioGradient trial_parts = ratio_parts(mesh, quad, q, trial_full);
                if (trial_parts.gradient_norm_pow > 0.0) {
                    double trial_r = ratio(trial_full, trial_parts);
                    if (trial_r > r) {
                        reduced = trial;
                        full = trial_full;
                        parts = trial_parts;
                        improved = trial_r > r * (1.0 + 1e-12);
                        r = trial_r;
                        if (improved) break;
                    }
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        best = std::max(best, r);
        ++productive_starts;
    }
    if (productive_starts == 0)
        throw solver_error("estimate_poincare_constant: every ascent start degenerated");
    out.constant = best;
    return out;
}

HolderCheck verify_holder_chain(const ScalarField& u, const WeightField& n, const Mesh& mesh,
                                const QuadratureRule& quad) {
    if (!u.is_nodal())
        throw std::invalid_argument("verify_holder_chain: u must be nodal");
    for (int b : mesh.boundary_nodes)
        if (u.coefficients()[b] != 0.0)
            throw std::invalid_argument("verify_holder_chain: u must vanish on the boundary");

    HolderCheck out;
    IntegrabilityReport report = check_inverse_integrability(n, 2.0, mesh, quad);
    if (report.divergent) return out;

    out.applicable = true;
    out.constant = std::pow(report.value, 0.25);
    out.lhs = gradient_norm(u, 4.0 / 3.0, mesh, quad);
    out.rhs = out.constant * gradient_norm(u, 2.0, n, mesh, quad);
    out.slack = out.rhs - out.lhs;
    out.holds = out.lhs <= out.rhs;
    return out;
}

ConstantsReport estimate_constants(const Mesh& mesh, const WeightField& n,
                                   const QuadratureRule& quad, double poincare_q,
                                   const EigenOptions& options) {
    ScalarField zero = ScalarField::from_expression([](double, double) { return 0.0; });
    AssembledSystem sys = assemble_system(mesh, n, zero, quad);

    ConstantsReport report;
    EigenSequence seq = solve_eigenpairs(sys, 1, options);
    double lambda1 = seq.values.front();
    report.hardy = 1.0 / std::sqrt(lambda1);
    report.coercivity = lambda1 / (1.0 + lambda1);

    PoincareOptions popt;
    popt.quadrature_degree = quad.exactness_degree;
    PoincareEstimate poincare = estimate_poincare_constant(mesh, poincare_q, popt);
    report.poincare_q = poincare.q;
    report.poincare = poincare.constant;
    report.poincare_heuristic = poincare.heuristic;

    // Largest sampled continuity ratio; the exact bound is C = 1.
    std::mt19937 rng(options.seed + 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    SparseMatrix h = sys.mass + sys.stiffness;
    double worst = 0.0;
    for (int sample = 0; sample < 1000; ++sample) {
        Eigen::VectorXd u(sys.size()), v(sys.size());
        for (auto& c : u) c = normal(rng);
        for (auto& c : v) c = normal(rng);
        double q_uv = std::abs(u.dot(sys.stiffness * v));
        double norm_u = std::sqrt(u.dot(h * u));
        double norm_v = std::sqrt(v.dot(h * v));
        if (norm_u > 0.0 && norm_v > 0.0)
            worst = std::max(worst, q_uv / (norm_u * norm_v));
    }
    report.continuity = worst;

    IntegrabilityReport inv2 = check_inverse_integrability(n, 2.0, mesh, quad);
    report.holder_applicable = !inv2.divergent;
    report.holder_embedding = inv2.divergent ? 0.0 : std::pow(inv2.value, 0.25);
    return report;
}

} // namespace wsturm
