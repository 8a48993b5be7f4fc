#include "wsturm/field.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "wsturm/errors.hpp"
#include "p1.hpp"

namespace wsturm {

ScalarField ScalarField::from_expression(Fn f) {
    if (!f) throw std::invalid_argument("ScalarField: null expression callable");
    ScalarField field;
    field.fn_ = std::move(f);
    return field;
}

ScalarField ScalarField::from_nodal(const Mesh& mesh, Eigen::VectorXd coefficients,
                                    bool zero_boundary) {
    if (coefficients.size() != mesh.node_count())
        throw std::invalid_argument("ScalarField: coefficient count != node count");
    if (zero_boundary) {
        for (int b : mesh.boundary_nodes)
            if (coefficients[b] != 0.0)
                throw std::invalid_argument(
                    "ScalarField: zero_boundary set but a boundary coefficient is nonzero");
    }
    ScalarField field;
    field.coeffs_ = std::make_shared<const Eigen::VectorXd>(std::move(coefficients));
    field.zero_boundary_ = zero_boundary;
    return field;
}

const Eigen::VectorXd& ScalarField::coefficients() const {
    if (!coeffs_) throw error("ScalarField: not in nodal form");
    return *coeffs_;
}

double ScalarField::expression_value(double x, double y) const {
    if (!fn_) throw error("ScalarField: not in expression form");
    return fn_(x, y);
}

WeightField WeightField::from_expression(Fn f) {
    WeightField w;
    w.field_ = ScalarField::from_expression(std::move(f));
    return w;
}

WeightField WeightField::from_nodal(const Mesh& mesh, Eigen::VectorXd coefficients) {
    for (Eigen::Index i = 0; i < coefficients.size(); ++i)
        if (coefficients[i] < 0.0)
            throw admissibility_error("WeightField: negative nodal coefficient at node " +
                                      std::to_string(i));
    WeightField w;
    w.field_ = ScalarField::from_nodal(mesh, std::move(coefficients));
    return w;
}

namespace {

// Locates the element containing p, within ~1e-12 of the domain closure.
// Returns element index and barycentric coordinates, or -1.
int locate(const Mesh& mesh, Point p, std::array<double, 3>& bary) {
    int best = -1;
    double best_violation = std::numeric_limits<double>::infinity();
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        std::array<double, 3> l{};
        double scale;
        if (mesh.dim == 1) {
            double x0 = mesh.nodes[el[0]].x, x1 = mesh.nodes[el[1]].x;
            double s = (p.x - x0) / (x1 - x0);
            l = {1.0 - s, s, 0.0};
            scale = 1.0 / std::abs(x1 - x0);
        } else {
            l = detail::barycentric(mesh, e, p);
            double diam = detail::element_diameter(mesh, e);
            scale = diam / (2.0 * mesh.element_measures[e]);
        }
        double violation = 0.0;
        for (int k = 0; k < mesh.nodes_per_element(); ++k)
            violation = std::max(violation, -l[k]);
        // Barycentric deficit ~ (distance outside) * scale.
        double tol = 1e-12 * scale * (1.0 + std::abs(p.x) + std::abs(p.y)) + 1e-15;
        if (violation <= tol) {
            bary = l;
            return e;
        }
        if (violation < best_violation) best_violation = violation;
    }
    (void)best;
    return -1;
}

} // namespace

double evaluate(const ScalarField& f, Point p, const Mesh& mesh) {
    std::array<double, 3> bary{};
    int e = locate(mesh, p, bary);
    if (e < 0)
        throw std::invalid_argument("evaluate: point (" + std::to_string(p.x) + ", " +
                                    std::to_string(p.y) + ") lies outside the domain");
    if (f.is_nodal()) return detail::p1_value(mesh, f.coefficients(), e, bary);
    return f.expression_value(p.x, p.y);
}

double evaluate(const WeightField& f, Point p, const Mesh& mesh) {
    return evaluate(f.field(), p, mesh);
}

ScalarField interpolate(const Mesh& mesh, const ScalarField& f, bool force_zero_boundary) {
    if (f.is_nodal()) {
        Eigen::VectorXd coeffs = f.coefficients();
        if (force_zero_boundary)
            for (int b : mesh.boundary_nodes) coeffs[b] = 0.0;
        return ScalarField::from_nodal(mesh, std::move(coeffs), force_zero_boundary);
    }
    Eigen::VectorXd coeffs(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i)
        coeffs[i] = f.expression_value(mesh.nodes[i].x, mesh.nodes[i].y);
    if (force_zero_boundary)
        for (int b : mesh.boundary_nodes) coeffs[b] = 0.0;
    return ScalarField::from_nodal(mesh, std::move(coeffs), force_zero_boundary);
}

ScalarField interpolate(const Mesh& mesh, const ScalarField::Fn& f, bool force_zero_boundary) {
    return interpolate(mesh, ScalarField::from_expression(f), force_zero_boundary);
}

} // namespace wsturm
