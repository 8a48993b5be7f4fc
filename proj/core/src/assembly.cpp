#include "wsturm/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "wsturm/errors.hpp"
#include "p1.hpp"
#include "parallel_for.hpp"

namespace wsturm {

namespace {

using Triplet = Eigen::Triplet<double>;

// Local stiffness of element e: (int_e n) * (g_i . g_j); the P1 gradients
// are constant so only the weight needs quadrature.
std::array<double, 9> local_stiffness(const Mesh& mesh, const WeightField& n,
                                      const QuadratureRule& quad, int e) {
    int nv = mesh.nodes_per_element();
    double weight_integral = 0.0;
    double scale = detail::jacobian_scale(mesh, e);
    for (int q = 0; q < quad.size(); ++q) {
        auto bary = detail::reference_barycentric(mesh.dim, quad.points[q]);
        Point x = detail::map_to_element(mesh, e, quad.points[q]);
        weight_integral += quad.weights[q] * detail::admissible_weight_value(n, mesh, e, bary, x);
    }
    weight_integral *= scale;

    auto grads = detail::shape_gradients(mesh, e);
    std::array<double, 9> local{};
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j)
            local[i * 3 + j] =
                weight_integral * (grads[i].x * grads[j].x + grads[i].y * grads[j].y);
    return local;
}

std::array<double, 9> local_mass(const Mesh& mesh, const QuadratureRule& quad, int e) {
    int nv = mesh.nodes_per_element();
    double scale = detail::jacobian_scale(mesh, e);
    std::array<double, 9> local{};
    for (int q = 0; q < quad.size(); ++q) {
        auto bary = detail::reference_barycentric(mesh.dim, quad.points[q]);
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j)
                local[i * 3 + j] += quad.weights[q] * bary[i] * bary[j];
    }
    for (auto& v : local) v *= scale;
    return local;
}

SparseMatrix from_local(const Mesh& mesh, const std::vector<std::array<double, 9>>& locals) {
    int nv = mesh.nodes_per_element();
    std::vector<Triplet> triplets;
    triplets.reserve(locals.size() * nv * nv);
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const auto& local = locals[e];
        // Off-diagonal pairs are pushed as (i,j) and (j,i) with the exact
        // same value and in the same element order, so the accumulated
        // matrix is bitwise symmetric.
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j)
                triplets.emplace_back(el[i], el[j], local[i * 3 + j]);
    }
    SparseMatrix out(mesh.node_count(), mesh.node_count());
    out.setFromTriplets(triplets.begin(), triplets.end());
    out.makeCompressed();
    return out;
}

// Adaptive per-element load integration. Shape functions always belong to
// the parent element; sub-simplices only move the quadrature points.
class LoadIntegrator {
public:
    LoadIntegrator(const Mesh& mesh, const ScalarField& zeta, const QuadratureRule& quad)
        : mesh_(mesh), zeta_(zeta), quad_(quad) {}

    std::array<double, 3> element_load(int e, double tol) {
        e_ = e;
        tol_ = tol;
        level_mag_.assign(kMaxDepth + 1, 0.0);
        hit_cap_ = false;
        std::array<double, 3> acc{};
        const auto& el = mesh_.elements[e];
        std::array<Point, 3> corners{};
        for (int k = 0; k < mesh_.nodes_per_element(); ++k) corners[k] = mesh_.nodes[el[k]];
        recurse(corners, 0, acc);
        if (hit_cap_) check_divergence();
        return acc;
    }

private:
    static constexpr int kMaxDepth = 40;

    const Mesh& mesh_;
    const ScalarField& zeta_;
    const QuadratureRule& quad_;
    int e_ = 0;
    double tol_ = 0.0;
    std::vector<double> level_mag_;
    bool hit_cap_ = false;

    double measure(const std::array<Point, 3>& s) const {
        if (mesh_.dim == 1) return std::abs(s[1].x - s[0].x);
        return 0.5 * std::abs((s[1].x - s[0].x) * (s[2].y - s[0].y) -
                              (s[2].x - s[0].x) * (s[1].y - s[0].y));
    }

    std::array<double, 3> parent_bary(Point p) const {
        if (mesh_.dim == 2) return detail::barycentric(mesh_, e_, p);
        const auto& el = mesh_.elements[e_];
        double x0 = mesh_.nodes[el[0]].x, x1 = mesh_.nodes[el[1]].x;
        double s = (p.x - x0) / (x1 - x0);
        return {1.0 - s, s, 0.0};
    }

    bool gauss(const std::array<Point, 3>& s, std::array<double, 3>& out) const {
        double scale = mesh_.dim == 1 ? measure(s) : 2.0 * measure(s);
        out = {0.0, 0.0, 0.0};
        for (int q = 0; q < quad_.size(); ++q) {
            Point ref = quad_.points[q];
            Point x = mesh_.dim == 1
                          ? Point{s[0].x + ref.x * (s[1].x - s[0].x), 0.0}
                          : Point{s[0].x + ref.x * (s[1].x - s[0].x) + ref.y * (s[2].x - s[0].x),
                                  s[0].y + ref.x * (s[1].y - s[0].y) + ref.y * (s[2].y - s[0].y)};
            auto bary = parent_bary(x);
            double z = detail::field_value(zeta_, mesh_, e_, bary, x);
            if (!std::isfinite(z)) return false;
            for (int k = 0; k < mesh_.nodes_per_element(); ++k)
                out[k] += quad_.weights[q] * bary[k] * z;
        }
        for (auto& v : out) v *= scale;
        return true;
    }

    void split(const std::array<Point, 3>& s, std::array<std::array<Point, 3>, 4>& out,
               int& count) const {
        auto mid = [](Point a, Point b) { return Point{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; };
        if (mesh_.dim == 1) {
            Point m = mid(s[0], s[1]);
            out[0] = {s[0], m, {}};
            out[1] = {m, s[1], {}};
            count = 2;
            return;
        }
        Point m01 = mid(s[0], s[1]), m12 = mid(s[1], s[2]), m20 = mid(s[2], s[0]);
        out[0] = {s[0], m01, m20};
        out[1] = {m01, s[1], m12};
        out[2] = {m20, m12, s[2]};
        out[3] = {m01, m12, m20};
        count = 4;
    }

    void accept(const std::array<double, 3>& value, int depth, std::array<double, 3>& acc) {
        for (int k = 0; k < 3; ++k) acc[k] += value[k];
        double mag = std::max({std::abs(value[0]), std::abs(value[1]), std::abs(value[2])});
        level_mag_[std::min(depth, kMaxDepth)] += mag;
    }

    void recurse(const std::array<Point, 3>& s, int depth, std::array<double, 3>& acc) {
        std::array<double, 3> parent{};
        bool parent_ok = gauss(s, parent);

        std::array<std::array<Point, 3>, 4> children{};
        int nc = 0;
        split(s, children, nc);
        std::array<double, 3> child_sum{};
        bool children_ok = true;
        for (int i = 0; i < nc; ++i) {
            std::array<double, 3> value{};
            children_ok = gauss(children[i], value) && children_ok;
            for (int k = 0; k < 3; ++k) child_sum[k] += value[k];
        }

        if (parent_ok && children_ok) {
            double diff = 0.0;
            for (int k = 0; k < 3; ++k) diff = std::max(diff, std::abs(child_sum[k] - parent[k]));
            if (diff <= tol_) {
                accept(child_sum, depth, acc);
                return;
            }
        }
        if (depth >= kMaxDepth) {
            if (!children_ok)
                throw divergence_error("assemble_load: non-integrable right-hand side near (" +
                                       std::to_string(s[0].x) + ", " + std::to_string(s[0].y) +
                                       ")");
            hit_cap_ = true;
            accept(child_sum, depth, acc);
            return;
        }
        for (int i = 0; i < nc; ++i) recurse(children[i], depth + 1, acc);
    }

    // The refinement cap was reached: if the per-level contributions of
    // the deepest levels stopped decaying, the integrand is not
    // integrable.
    void check_divergence() const {
        double c0 = level_mag_[kMaxDepth - 2];
        double c1 = level_mag_[kMaxDepth - 1];
        double c2 = level_mag_[kMaxDepth];
        if (c0 > 0.0 && c1 >= 0.98 * c0 && c2 >= 0.98 * c1)
            throw divergence_error("assemble_load: right-hand side contributions do not decay "
                                   "under refinement (non-integrable)");
    }
};

} // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh, const WeightField& n,
                                const QuadratureRule& quad) {
    if (!n.valid()) throw std::invalid_argument("assemble_stiffness: empty weight");
    std::vector<std::array<double, 9>> locals(mesh.element_count());
    // Exceptions from worker threads (negative weight) must reach the
    // caller; run serially unless threading is requested.
    std::exception_ptr failure;
    detail::parallel_for(mesh.element_count(), [&](int e) {
        try {
            locals[e] = local_stiffness(mesh, n, quad, e);
        } catch (...) {
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return from_local(mesh, locals);
}

SparseMatrix assemble_mass(const Mesh& mesh, const QuadratureRule& quad) {
    std::vector<std::array<double, 9>> locals(mesh.element_count());
    detail::parallel_for(mesh.element_count(),
                         [&](int e) { locals[e] = local_mass(mesh, quad, e); });
    return from_local(mesh, locals);
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& zeta,
                              const QuadratureRule& quad) {
    if (!zeta.valid()) throw std::invalid_argument("assemble_load: empty field");

    // First pass fixes the magnitude scale for the refinement tolerance.
    LoadIntegrator integrator(mesh, zeta, quad);
    double scale = 0.0;
    std::vector<std::array<double, 3>> plain(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
        plain[e] = integrator.element_load(e, std::numeric_limits<double>::infinity());
        for (int k = 0; k < mesh.nodes_per_element(); ++k)
            scale = std::max(scale, std::abs(plain[e][k]));
    }
    double tol = 1e-10 * scale + 1e-16;

    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.node_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
        auto local = integrator.element_load(e, tol);
        const auto& el = mesh.elements[e];
        for (int k = 0; k < mesh.nodes_per_element(); ++k) load[el[k]] += local[k];
    }
    return load;
}

AssembledSystem apply_dirichlet(const SparseMatrix& stiffness, const SparseMatrix& mass,
                                const Eigen::VectorXd& load, const Mesh& mesh) {
    if (stiffness.rows() != mesh.node_count() || mass.rows() != mesh.node_count() ||
        load.size() != mesh.node_count())
        throw std::invalid_argument("apply_dirichlet: dimension mismatch with mesh");

    AssembledSystem sys;
    sys.node_count = mesh.node_count();
    std::vector<int> full_to_reduced(mesh.node_count(), -1);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (!mesh.is_boundary(i)) {
            full_to_reduced[i] = static_cast<int>(sys.interior_dofs.size());
            sys.interior_dofs.push_back(i);
        }
    }
    if (sys.interior_dofs.empty())
        throw error("apply_dirichlet: mesh has no interior degrees of freedom");

    auto reduce = [&](const SparseMatrix& full) {
        std::vector<Triplet> triplets;
        triplets.reserve(full.nonZeros());
        for (int col = 0; col < full.outerSize(); ++col) {
            int rc = full_to_reduced[col];
            if (rc < 0) continue;
            for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
                int rr = full_to_reduced[it.row()];
                if (rr < 0) continue;
                triplets.emplace_back(rr, rc, it.value());
            }
        }
        SparseMatrix out(sys.size(), sys.size());
        out.setFromTriplets(triplets.begin(), triplets.end());
        out.makeCompressed();
        return out;
    };

    sys.stiffness = reduce(stiffness);
    sys.mass = reduce(mass);
    sys.load.resize(sys.size());
    for (int r = 0; r < sys.size(); ++r) sys.load[r] = load[sys.interior_dofs[r]];
    return sys;
}

AssembledSystem assemble_system(const Mesh& mesh, const WeightField& n, const ScalarField& zeta,
                                const QuadratureRule& quad) {
    SparseMatrix stiffness = assemble_stiffness(mesh, n, quad);
    SparseMatrix mass = assemble_mass(mesh, quad);
    Eigen::VectorXd load = assemble_load(mesh, zeta, quad);
    AssembledSystem sys = apply_dirichlet(stiffness, mass, load, mesh);
    sys.weight_snapshot = n;
    return sys;
}

ScalarField to_full_field(const AssembledSystem& system, const Mesh& mesh,
                          const Eigen::VectorXd& reduced) {
    if (reduced.size() != system.size())
        throw std::invalid_argument("to_full_field: reduced size mismatch");
    Eigen::VectorXd full = Eigen::VectorXd::Zero(system.node_count);
    for (int r = 0; r < system.size(); ++r) full[system.interior_dofs[r]] = reduced[r];
    return ScalarField::from_nodal(mesh, std::move(full), true);
}

void write_coordinate_format(const SparseMatrix& matrix, std::ostream& os) {
    char line[96];
    for (int col = 0; col < matrix.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
            std::snprintf(line, sizeof(line), "%d %d %.17g\n", static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
            os << line;
        }
    }
}

} // namespace wsturm
