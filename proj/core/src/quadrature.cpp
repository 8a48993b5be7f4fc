#include "wsturm/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace wsturm {

namespace {

constexpr int kMaxDegree = 30;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n,
// seeded with the Chebyshev-like asymptotic estimate.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

} // namespace

QuadratureRule interval_rule(int degree) {
    if (degree < 0 || degree > kMaxDegree)
        throw std::invalid_argument("interval_rule: degree out of range");
    int n = degree / 2 + 1; // n-point Gauss is exact to degree 2n-1
    std::vector<double> x, w;
    gauss_legendre(n, x, w);

    QuadratureRule rule;
    rule.dim = 1;
    rule.exactness_degree = degree;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.points[i] = {0.5 * (x[i] + 1.0), 0.0};
        rule.weights[i] = 0.5 * w[i];
    }
    return rule;
}

QuadratureRule triangle_rule(int degree) {
    if (degree < 0 || degree > kMaxDegree)
        throw std::invalid_argument("triangle_rule: degree out of range");

    // Duffy map (u,v) -> (u, v(1-u)) with Jacobian (1-u). A total-degree-d
    // polynomial becomes degree <= d+1 in u (Jacobian included) and <= d
    // in v, so these point counts are exact.
    int nu = (degree + 1) / 2 + 1;
    int nv = degree / 2 + 1;
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre(nu, xu, wu);
    gauss_legendre(nv, xv, wv);

    QuadratureRule rule;
    rule.dim = 2;
    rule.exactness_degree = degree;
    rule.points.reserve(static_cast<std::size_t>(nu) * nv);
    rule.weights.reserve(static_cast<std::size_t>(nu) * nv);
    for (int i = 0; i < nu; ++i) {
        double u = 0.5 * (xu[i] + 1.0);
        double cu = 0.5 * wu[i];
        for (int j = 0; j < nv; ++j) {
            double v = 0.5 * (xv[j] + 1.0);
            double cv = 0.5 * wv[j];
            rule.points.push_back({u, v * (1.0 - u)});
            rule.weights.push_back(cu * cv * (1.0 - u));
        }
    }
    return rule;
}

QuadratureRule default_rule(int dim, int degree) {
    if (dim == 1) return interval_rule(degree);
    if (dim == 2) return triangle_rule(degree);
    throw std::invalid_argument("default_rule: dim must be 1 or 2");
}

} // namespace wsturm
