#include "wsturm/slices.hpp"

#include <cmath>
#include <stdexcept>

#include "wsturm/errors.hpp"
#include "wsturm/norms.hpp"
#include "p1.hpp"

namespace wsturm {

namespace {

// Smallest weight sample over all quadrature points and element vertices.
// Expression evaluation errors count as a failed nonnegativity check.
std::pair<bool, double> sample_nonnegativity(const WeightField& n, const Mesh& mesh,
                                             const QuadratureRule& quad) {
    double min_sample = std::numeric_limits<double>::infinity();
    auto probe = [&](const ScalarField& f, int e, const std::array<double, 3>& bary, Point x) {
        double v;
        try {
            v = detail::field_value(f, mesh, e, bary, x);
        } catch (const expr::eval_error&) {
            v = -std::numeric_limits<double>::infinity();
        }
        if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
        min_sample = std::min(min_sample, v);
    };
    for (int e = 0; e < mesh.element_count(); ++e) {
        for (int q = 0; q < quad.size(); ++q) {
            auto bary = detail::reference_barycentric(mesh.dim, quad.points[q]);
            Point x = detail::map_to_element(mesh, e, quad.points[q]);
            probe(n.field(), e, bary, x);
        }
        for (int k = 0; k < mesh.nodes_per_element(); ++k) {
            std::array<double, 3> bary{};
            bary[k] = 1.0;
            probe(n.field(), e, bary, mesh.nodes[mesh.elements[e][k]]);
        }
    }
    return {min_sample >= -detail::kWeightNegativeTol, min_sample};
}

Eigen::VectorXd nodal_coefficients(const ScalarField& f, const Mesh& mesh) {
    return interpolate(mesh, f).coefficients();
}

} // namespace

DensityCertificate certify_density(const WeightField& n, const Mesh& mesh,
                                   const QuadratureRule& quad) {
    DensityCertificate cert;
    auto [nonneg, min_sample] = sample_nonnegativity(n, mesh, quad);
    cert.nonnegative = nonneg;
    cert.min_sample = min_sample;
    if (cert.nonnegative) {
        cert.l1 = weight_l1_norm(n, mesh, quad);
        cert.inverse_square = check_inverse_integrability(n, 2.0, mesh, quad);
    } else {
        // The integral conditions presuppose a sign; report them failed.
        cert.l1.divergent = true;
        cert.inverse_square.s = 2.0;
        cert.inverse_square.divergent = true;
    }
    return cert;
}

ScalarField second_time_difference(const WeightField& prev, const WeightField& curr,
                                   const WeightField& next, double dt, const Mesh& mesh) {
    if (!(dt > 0.0))
        throw std::invalid_argument("second_time_difference: dt must be positive");
    Eigen::VectorXd a = nodal_coefficients(prev.field(), mesh);
    Eigen::VectorXd b = nodal_coefficients(curr.field(), mesh);
    Eigen::VectorXd c = nodal_coefficients(next.field(), mesh);
    Eigen::VectorXd diff = (a - 2.0 * b + c) / (dt * dt);
    return ScalarField::from_nodal(mesh, std::move(diff));
}

std::vector<SliceReport> run_time_series(const std::vector<SliceProblem>& slices,
                                         const Mesh& mesh, const SliceOptions& options) {
    if (slices.empty())
        throw std::invalid_argument("run_time_series: empty slice series");

    QuadratureRule quad = default_rule(mesh.dim, options.quadrature_degree);

    // Uniform slice spacing is what makes the central difference usable.
    bool uniform_dt = slices.size() >= 3;
    double dt = slices.size() >= 2 ? slices[1].t - slices[0].t : 0.0;
    for (std::size_t i = 2; i < slices.size() && uniform_dt; ++i)
        uniform_dt = std::abs((slices[i].t - slices[i - 1].t) - dt) <=
                     1e-12 * std::max(1.0, std::abs(dt));
    uniform_dt = uniform_dt && dt > 0.0;

    std::vector<SliceReport> reports(slices.size());
    for (std::size_t i = 0; i < slices.size(); ++i) {
        const SliceProblem& slice = slices[i];
        SliceReport& report = reports[i];
        report.t = slice.t;
        report.certificate = certify_density(slice.density, mesh, quad);
        if (!report.certificate.admissible()) continue;

        AssembledSystem sys = assemble_system(mesh, slice.density, slice.load, quad);
        WeakSolution solution = solve_weak(sys);
        report.solved = true;
        report.potential = solution.full;
        report.solve_residual = solution.residual;
        report.conditioning_warning = solution.conditioning_warning;

        EigenSequence seq = solve_eigenpairs(sys, 1, options.eigen);
        report.lambda1 = seq.values.front();
        report.hardy = 1.0 / std::sqrt(report.lambda1);

        if (!slice.current_rate.empty())
            report.force = force_integral(slice.current_rate, slice.density, mesh, quad);
        report.weizsacker = weizsacker_term(slice.density, mesh, quad);

        if (slice.internal_force && uniform_dt && i > 0 && i + 1 < slices.size()) {
            ScalarField d2n = second_time_difference(slices[i - 1].density, slice.density,
                                                     slices[i + 1].density, dt, mesh);
            Eigen::VectorXd mismatch = nodal_coefficients(slice.load, mesh) -
                                       nodal_coefficients(*slice.internal_force, mesh) +
                                       d2n.coefficients();
            ScalarField mismatch_field = ScalarField::from_nodal(mesh, std::move(mismatch));
            double residual = lp_norm(mismatch_field, 2.0, mesh, quad);
            double scale = 1.0 + lp_norm(interpolate(mesh, slice.load), 2.0, mesh, quad);
            report.consistency_residual = residual;
            report.consistency_ok = residual <= options.consistency_tol * scale;
        }
    }
    return reports;
}

} // namespace wsturm
