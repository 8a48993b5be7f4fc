#include "wsturm/norms.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "wsturm/errors.hpp"
#include "p1.hpp"
#include "parallel_for.hpp"

namespace wsturm {

namespace {

void check_exponent(double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("norm exponent p must satisfy p >= 1");
    if (p > 16.0)
        throw std::invalid_argument("norm exponent p > 16 is not supported");
}

// Element-wise quadrature of a pointwise integrand, summed in element order.
template <class Integrand>
double integrate_elements(const Mesh& mesh, const QuadratureRule& quad, Integrand&& f) {
    std::vector<double> partial(mesh.element_count(), 0.0);
    detail::parallel_for(mesh.element_count(), [&](int e) {
        double scale = detail::jacobian_scale(mesh, e);
        double acc = 0.0;
        for (int q = 0; q < quad.size(); ++q) {
            auto bary = detail::reference_barycentric(mesh.dim, quad.points[q]);
            Point x = detail::map_to_element(mesh, e, quad.points[q]);
            acc += quad.weights[q] * f(e, bary, x);
        }
        partial[e] = scale * acc;
    });
    return std::accumulate(partial.begin(), partial.end(), 0.0);
}

const Eigen::VectorXd& nodal_or_throw(const ScalarField& u, const char* who) {
    if (!u.is_nodal())
        throw std::invalid_argument(std::string(who) +
                                    ": expression-form field has no P1 gradient; "
                                    "project with interpolate() first");
    return u.coefficients();
}

double gradient_magnitude(const Mesh& mesh, const Eigen::VectorXd& coeffs, int e) {
    Point g = detail::p1_gradient(mesh, coeffs, e);
    return mesh.dim == 1 ? std::abs(g.x) : std::hypot(g.x, g.y);
}

} // namespace

double lp_norm(const ScalarField& u, double p, const Mesh& mesh, const QuadratureRule& quad) {
    check_exponent(p);
    double total = integrate_elements(mesh, quad, [&](int e, const auto& bary, Point x) {
        return std::pow(std::abs(detail::field_value(u, mesh, e, bary, x)), p);
    });
    return std::pow(total, 1.0 / p);
}

double weighted_lp_norm(const ScalarField& u, double p, const WeightField& n, const Mesh& mesh,
                        const QuadratureRule& quad) {
    check_exponent(p);
    double total = integrate_elements(mesh, quad, [&](int e, const auto& bary, Point x) {
        double w = detail::admissible_weight_value(n, mesh, e, bary, x);
        return std::pow(std::abs(detail::field_value(u, mesh, e, bary, x)), p) * w;
    });
    return std::pow(total, 1.0 / p);
}

double gradient_norm(const ScalarField& u, double p, const Mesh& mesh,
                     const QuadratureRule& quad) {
    check_exponent(p);
    const Eigen::VectorXd& coeffs = nodal_or_throw(u, "gradient_norm");
    double total = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e)
        total += mesh.element_measures[e] * std::pow(gradient_magnitude(mesh, coeffs, e), p);
    return std::pow(total, 1.0 / p);
}

double gradient_norm(const ScalarField& u, double p, const WeightField& n, const Mesh& mesh,
                     const QuadratureRule& quad) {
    check_exponent(p);
    const Eigen::VectorXd& coeffs = nodal_or_throw(u, "gradient_norm");
    // |grad u| is constant per element; only the weight needs quadrature.
    double total = integrate_elements(mesh, quad, [&](int e, const auto& bary, Point x) {
        double w = detail::admissible_weight_value(n, mesh, e, bary, x);
        return std::pow(gradient_magnitude(mesh, coeffs, e), p) * w;
    });
    return std::pow(total, 1.0 / p);
}

double weighted_sobolev_norm(const ScalarField& u, double p, const WeightField& n,
                             const Mesh& mesh, const QuadratureRule& quad) {
    check_exponent(p);
    double value_part = lp_norm(u, p, mesh, quad);
    double grad_part = gradient_norm(u, p, n, mesh, quad);
    return std::pow(std::pow(value_part, p) + std::pow(grad_part, p), 1.0 / p);
}

} // namespace wsturm
