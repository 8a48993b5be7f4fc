#pragma once

#include <functional>
#include <memory>

#include <Eigen/Core>

#include "wsturm/mesh.hpp"

namespace wsturm {

struct DensityCertificate;

/// A scalar function on the domain, held either as a closed-form
/// expression (an arbitrary callable of the coordinates) or as nodal
/// coefficients of the piecewise-linear interpolant on a mesh.
class ScalarField {
public:
    using Fn = std::function<double(double, double)>;

    ScalarField() = default;

    static ScalarField from_expression(Fn f);

    /// Nodal form; the coefficient vector must match the mesh node count.
    /// With `zero_boundary` set, every boundary coefficient must be
    /// exactly zero (membership in the zero-trace subspace).
    static ScalarField from_nodal(const Mesh& mesh, Eigen::VectorXd coefficients,
                                  bool zero_boundary = false);

    bool valid() const { return fn_ != nullptr || coeffs_ != nullptr; }
    bool is_nodal() const { return coeffs_ != nullptr; }
    bool zero_boundary() const { return zero_boundary_; }

    const Eigen::VectorXd& coefficients() const;
    double expression_value(double x, double y) const;

private:
    Fn fn_;
    std::shared_ptr<const Eigen::VectorXd> coeffs_;
    bool zero_boundary_ = false;
};

/// The nonnegative weighting function of the Sturm-Liouville operator
/// (physically a one-particle density). Nodal coefficients are validated
/// to be nonnegative at construction; expression forms are checked at
/// every evaluation site that requires admissibility.
class WeightField {
public:
    using Fn = ScalarField::Fn;

    WeightField() = default;

    static WeightField from_expression(Fn f);
    static WeightField from_nodal(const Mesh& mesh, Eigen::VectorXd coefficients);

    const ScalarField& field() const { return field_; }
    bool valid() const { return field_.valid(); }

    /// Optional cached admissibility record attached by certify_density.
    std::shared_ptr<const DensityCertificate> certificate;

private:
    ScalarField field_;
};

/// Pointwise evaluation; the point must lie inside the domain closure
/// (within 1e-12 of it). Nodal fields interpolate linearly via barycentric
/// coordinates of the containing element.
double evaluate(const ScalarField& f, Point p, const Mesh& mesh);
double evaluate(const WeightField& f, Point p, const Mesh& mesh);

/// Nodal interpolant: samples the field at every mesh node. Pass
/// `force_zero_boundary` to clamp boundary coefficients to exactly zero.
ScalarField interpolate(const Mesh& mesh, const ScalarField& f,
                        bool force_zero_boundary = false);
ScalarField interpolate(const Mesh& mesh, const ScalarField::Fn& f,
                        bool force_zero_boundary = false);

} // namespace wsturm
