#include "wsturm/integrals.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "wsturm/errors.hpp"
#include "p1.hpp"

namespace wsturm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Geometric refinement parameters. Shell sums whose last increments decay
// slower than kDivergenceRatio are declared divergent; decaying tails are
// summed by geometric extrapolation.
constexpr int kShellLevels = 40;
constexpr double kDivergenceRatio = 0.98;
constexpr double kTailClamp = 0.97;
constexpr int kPolishDepth = 4;
constexpr double kPolishRelTol = 1e-9;
constexpr int kChainDepth = 20;
constexpr double kHugeSample = 1e30;

// A 1D segment or a triangle, in physical coordinates.
struct Simplex {
    std::array<Point, 3> v{};
    int nverts = 2;

    double measure() const {
        if (nverts == 2) return std::abs(v[1].x - v[0].x);
        return 0.5 * std::abs((v[1].x - v[0].x) * (v[2].y - v[0].y) -
                              (v[2].x - v[0].x) * (v[1].y - v[0].y));
    }
};

Point lerp(Point a, Point b, double s) {
    return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
}

Simplex element_simplex(const Mesh& mesh, int e) {
    Simplex s;
    s.nverts = mesh.nodes_per_element();
    for (int k = 0; k < s.nverts; ++k) s.v[k] = mesh.nodes[mesh.elements[e][k]];
    return s;
}

// Integrates one pointwise integrand over the mesh. Elements where the
// singular-point predicate fires at a vertex are handled by shells of
// ratio 2 toward the singular set; a predicate hit at an interior
// quadrature point starts a bisection chain toward it. Everything is
// evaluated in deterministic element order.
class SingularIntegrator {
public:
    using Integrand = std::function<double(int, Point)>;     // (parent element, point)
    using PointFlag = std::function<bool(int, Point)>;       // singular there?

    SingularIntegrator(const Mesh& mesh, const QuadratureRule& quad, Integrand f,
                       PointFlag singular_at)
        : mesh_(mesh), quad_(quad), f_(std::move(f)), singular_at_(std::move(singular_at)) {}

    IntegralEstimate run() {
        IntegralEstimate out;
        for (int e = 0; e < mesh_.element_count() && !divergent_; ++e) {
            element_ = e;
            chain_levels_.assign(kChainDepth + 1, 0.0);
            chain_hit_cap_ = false;
            integrate_simplex(element_simplex(mesh_, e), 0);
            if (chain_hit_cap_ && !divergent_) finish_chain();
        }
        out.value = divergent_ ? kInf : total_;
        out.divergent = divergent_;
        out.estimated_error = err_;
        out.singularity_adapted = adapted_;
        return out;
    }

private:
    const Mesh& mesh_;
    const QuadratureRule& quad_;
    Integrand f_;
    PointFlag singular_at_;

    int element_ = 0;
    double total_ = 0.0;
    double err_ = 0.0;
    bool divergent_ = false;
    bool adapted_ = false;
    std::vector<double> chain_levels_;
    bool chain_hit_cap_ = false;

    bool flagged(Point p) const { return singular_at_(element_, p); }

    // Plain rule application; reports the worst sample through `bad`.
    double gauss(const Simplex& s, Point* bad = nullptr) const {
        double scale = s.nverts == 2 ? s.measure() : 2.0 * s.measure();
        double acc = 0.0;
        for (int q = 0; q < quad_.size(); ++q) {
            Point ref = quad_.points[q];
            Point x = s.nverts == 2 ? lerp(s.v[0], s.v[1], ref.x)
                                    : Point{s.v[0].x + ref.x * (s.v[1].x - s.v[0].x) +
                                                ref.y * (s.v[2].x - s.v[0].x),
                                            s.v[0].y + ref.x * (s.v[1].y - s.v[0].y) +
                                                ref.y * (s.v[2].y - s.v[0].y)};
            double value = f_(element_, x);
            if (!std::isfinite(value) || std::abs(value) > kHugeSample || flagged(x)) {
                if (bad) *bad = x;
                return kInf;
            }
            acc += quad_.weights[q] * value;
        }
        return scale * acc;
    }

    // Adaptive bisection polish for smooth-but-steep pieces (shell
    // segments). Non-finite samples propagate as +inf.
    double polish(const Simplex& s, int depth) {
        if (s.measure() == 0.0) return 0.0;
        double parent = gauss(s);
        if (!std::isfinite(parent)) return parent;
        if (depth == 0) return parent;
        std::array<Simplex, 4> children{};
        int nc = split(s, children);
        double sum = 0.0;
        for (int i = 0; i < nc; ++i) {
            double c = gauss(children[i]);
            if (!std::isfinite(c)) return c;
            sum += c;
        }
        if (std::abs(sum - parent) <= kPolishRelTol * (std::abs(sum) + 1e-300)) return sum;
        double refined = 0.0;
        for (int i = 0; i < nc; ++i) {
            double c = polish(children[i], depth - 1);
            if (!std::isfinite(c)) return c;
            refined += c;
        }
        return refined;
    }

    static int split(const Simplex& s, std::array<Simplex, 4>& out) {
        if (s.nverts == 2) {
            Point m = lerp(s.v[0], s.v[1], 0.5);
            out[0] = {{s.v[0], m, {}}, 2};
            out[1] = {{m, s.v[1], {}}, 2};
            return 2;
        }
        Point m01 = lerp(s.v[0], s.v[1], 0.5);
        Point m12 = lerp(s.v[1], s.v[2], 0.5);
        Point m20 = lerp(s.v[2], s.v[0], 0.5);
        out[0] = {{s.v[0], m01, m20}, 3};
        out[1] = {{m01, s.v[1], m12}, 3};
        out[2] = {{m20, m12, s.v[2]}, 3};
        out[3] = {{m01, m12, m20}, 3};
        return 4;
    }

    void integrate_simplex(const Simplex& s, int depth) {
        if (divergent_) return;
        int flags[3] = {0, 0, 0};
        int nflag = 0;
        for (int k = 0; k < s.nverts; ++k) {
            flags[k] = flagged(s.v[k]) ? 1 : 0;
            nflag += flags[k];
        }

        if (nflag == 0) {
            plain_with_chain(s, depth);
            return;
        }
        adapted_ = true;

        if (s.nverts == 2) {
            if (nflag == 2) {
                // Zeros at both endpoints: split once, then two shell runs.
                std::array<Simplex, 4> children{};
                split(s, children);
                integrate_simplex(children[0], depth + 1);
                integrate_simplex(children[1], depth + 1);
                return;
            }
            int sing = flags[0] ? 0 : 1;
            shells_interval(s.v[sing], s.v[1 - sing]);
            return;
        }

        if (nflag == 3) {
            // Vanishing at all three corners. Split a few times (interior
            // may be clean); if the corners never clear, probe directly.
            if (depth < 4) {
                std::array<Simplex, 4> children{};
                int nc = split(s, children);
                for (int i = 0; i < nc; ++i) integrate_simplex(children[i], depth + 1);
            } else {
                double v = gauss(s);
                if (!std::isfinite(v)) {
                    divergent_ = true;
                    return;
                }
                total_ += v;
                err_ += std::abs(v);
            }
            return;
        }
        if (nflag == 2) {
            int clean = !flags[0] ? 0 : (!flags[1] ? 1 : 2);
            shells_edge(s, clean);
            return;
        }
        int sing = flags[0] ? 0 : (flags[1] ? 1 : 2);
        shells_corner(s, sing);
    }

    // Plain element; a singular sample away from the vertices starts a
    // bisection chain toward it.
    void plain_with_chain(const Simplex& s, int depth) {
        Point bad{};
        double v = gauss(s, &bad);
        if (std::isfinite(v)) {
            total_ += v;
            if (depth > 0 && depth <= kChainDepth) chain_levels_[depth] += v;
            return;
        }
        adapted_ = true;
        if (depth >= kChainDepth) {
            chain_hit_cap_ = true;
            return;
        }
        std::array<Simplex, 4> children{};
        int nc = split(s, children);
        for (int i = 0; i < nc; ++i) integrate_simplex(children[i], depth + 1);
    }

    // The chain hit its depth cap: decide from the per-level sums whether
    // the remainder converges, and extrapolate it if so.
    void finish_chain() {
        std::vector<double> cs;
        for (int d = 1; d <= kChainDepth; ++d)
            if (chain_levels_[d] != 0.0) cs.push_back(chain_levels_[d]);
        if (cs.size() < 4) {
            divergent_ = true;
            return;
        }
        classify_tail(cs);
    }

    void shells_interval(Point sing, Point far) {
        std::vector<double> cs;
        double sum = 0.0;
        for (int j = 0; j < kShellLevels; ++j) {
            Simplex shell{{lerp(sing, far, std::ldexp(1.0, -(j + 1))),
                           lerp(sing, far, std::ldexp(1.0, -j)),
                           {}},
                          2};
            double c = polish(shell, kPolishDepth);
            if (!std::isfinite(c)) {
                divergent_ = true;
                return;
            }
            cs.push_back(c);
            sum += c;
            if (std::abs(c) <= 1e-16 * (1.0 + std::abs(total_ + sum))) {
                total_ += sum;
                err_ += 2.0 * std::abs(c);
                return;
            }
        }
        total_ += sum;
        classify_tail(cs);
    }

    void shells_corner(const Simplex& s, int sing) {
        Point c0 = s.v[sing], p = s.v[(sing + 1) % 3], q = s.v[(sing + 2) % 3];
        run_shells([&](double s0, double s1, std::array<Simplex, 2>& out) {
            Point a1 = lerp(c0, p, s1), a2 = lerp(c0, q, s1);
            Point b1 = lerp(c0, p, s0), b2 = lerp(c0, q, s0);
            out[0] = {{a1, a2, b2}, 3};
            out[1] = {{a1, b2, b1}, 3};
        });
    }

    void shells_edge(const Simplex& s, int clean) {
        Point v = s.v[clean], e0 = s.v[(clean + 1) % 3], e1 = s.v[(clean + 2) % 3];
        run_shells([&](double s0, double s1, std::array<Simplex, 2>& out) {
            Point p00 = lerp(e0, v, s0), p10 = lerp(e1, v, s0);
            Point p01 = lerp(e0, v, s1), p11 = lerp(e1, v, s1);
            out[0] = {{p00, p10, p11}, 3};
            out[1] = {{p00, p11, p01}, 3};
        });
    }

    template <class MakeShell>
    void run_shells(MakeShell&& make_shell) {
        std::vector<double> cs;
        double sum = 0.0;
        for (int j = 0; j < kShellLevels; ++j) {
            std::array<Simplex, 2> pieces{};
            make_shell(std::ldexp(1.0, -(j + 1)), std::ldexp(1.0, -j), pieces);
            double c = 0.0;
            for (const auto& piece : pieces) {
                double part = polish(piece, kPolishDepth);
                if (!std::isfinite(part)) {
                    divergent_ = true;
                    return;
                }
                c += part;
            }
            cs.push_back(c);
            sum += c;
            if (std::abs(c) <= 1e-16 * (1.0 + std::abs(total_ + sum))) {
                total_ += sum;
                err_ += 2.0 * std::abs(c);
                return;
            }
        }
        total_ += sum;
        classify_tail(cs);
    }

    // Growth test on the last increments, then geometric tail summation.
    void classify_tail(const std::vector<double>& cs) {
        std::size_t n = cs.size();
        double r[3];
        for (int i = 0; i < 3; ++i) {
            double denom = cs[n - 4 + i];
            r[i] = denom == 0.0 ? 0.0 : cs[n - 3 + i] / denom;
        }
        double rmin = std::min({r[0], r[1], r[2]});
        double rmax = std::max({r[0], r[1], r[2]});
        if (rmin >= kDivergenceRatio) {
            divergent_ = true;
            return;
        }
        double rbar = std::cbrt(std::abs(r[0] * r[1] * r[2]));
        rbar = std::min(rbar, kTailClamp);
        double tail = cs.back() * rbar / (1.0 - rbar);
        total_ += tail;
        err_ += std::abs(tail) * std::min(1.0, (rmax - rmin) / std::max(1.0 - rbar, 0.03)) +
                1e-15 * std::abs(total_);
    }
};

// Field value at a physical point of a known parent element (no search).
double value_in_element(const ScalarField& f, const Mesh& mesh, int e, Point p) {
    if (!f.is_nodal()) return f.expression_value(p.x, p.y);
    std::array<double, 3> bary{};
    if (mesh.dim == 1) {
        const auto& el = mesh.elements[e];
        double x0 = mesh.nodes[el[0]].x, x1 = mesh.nodes[el[1]].x;
        double s = (p.x - x0) / (x1 - x0);
        bary = {1.0 - s, s, 0.0};
    } else {
        bary = detail::barycentric(mesh, e, p);
    }
    return detail::p1_value(mesh, f.coefficients(), e, bary);
}

// Weight value with the sign policy; expression evaluation errors read as
// +inf (a singular sample), never as exceptions, so that certification
// can report rather than abort.
double weight_sample(const WeightField& n, const Mesh& mesh, int e, Point p) {
    double v;
    try {
        v = value_in_element(n.field(), mesh, e, p);
    } catch (const expr::eval_error&) {
        return kInf;
    }
    if (v < -detail::kWeightNegativeTol)
        throw admissibility_error("weight is negative at (" + std::to_string(p.x) + ", " +
                                  std::to_string(p.y) + ")");
    return v < 0.0 ? 0.0 : v;
}

bool weight_vanishes(const WeightField& n, const Mesh& mesh, int e, Point p) {
    double v;
    try {
        v = value_in_element(n.field(), mesh, e, p);
    } catch (const expr::eval_error&) {
        return true;
    }
    return !std::isfinite(v) || v < detail::kWeightVanishTol;
}

// Central finite-difference gradient of an expression-form scalar,
// falling back to one-sided second-order stencils at the bounding box.
class FdGradient {
public:
    FdGradient(std::function<double(Point)> f, const Mesh& mesh, int dim)
        : f_(std::move(f)), dim_(dim) {
        xlo_ = xhi_ = mesh.nodes[0].x;
        ylo_ = yhi_ = mesh.nodes[0].y;
        for (const auto& p : mesh.nodes) {
            xlo_ = std::min(xlo_, p.x);
            xhi_ = std::max(xhi_, p.x);
            ylo_ = std::min(ylo_, p.y);
            yhi_ = std::max(yhi_, p.y);
        }
    }

    Point at(Point p) const {
        Point g{};
        g.x = partial(p, 0);
        if (dim_ == 2) g.y = partial(p, 1);
        return g;
    }

private:
    std::function<double(Point)> f_;
    int dim_;
    double xlo_, xhi_, ylo_, yhi_;

    double partial(Point p, int axis) const {
        double c = axis == 0 ? p.x : p.y;
        double lo = axis == 0 ? xlo_ : ylo_;
        double hi = axis == 0 ? xhi_ : yhi_;
        double h = std::cbrt(DBL_EPSILON) * (1.0 + std::abs(c));
        auto value = [&](double s) {
            Point q = p;
            (axis == 0 ? q.x : q.y) = s;
            return f_(q);
        };
        if (c - h >= lo && c + h <= hi)
            return (value(c + h) - value(c - h)) / (2.0 * h);
        if (c + h > hi)
            return (3.0 * value(c) - 4.0 * value(c - h) + value(c - 2.0 * h)) / (2.0 * h);
        return (-3.0 * value(c) + 4.0 * value(c + h) - value(c + 2.0 * h)) / (2.0 * h);
    }
};

} // namespace

IntegrabilityReport check_inverse_integrability(const WeightField& n, double s, const Mesh& mesh,
                                                const QuadratureRule& quad) {
    if (!(s > 0.0) || s > 16.0)
        throw std::invalid_argument("check_inverse_integrability: s must lie in (0, 16]");

    SingularIntegrator engine(
        mesh, quad,
        [&](int e, Point p) {
            double w = weight_sample(n, mesh, e, p);
            if (w < 1e-300) return kInf;
            return std::pow(w, -s);
        },
        [&](int e, Point p) { return weight_vanishes(n, mesh, e, p); });
    IntegralEstimate est = engine.run();

    IntegrabilityReport report;
    report.s = s;
    report.value = est.value;
    report.divergent = est.divergent;
    report.singularity_adapted = est.singularity_adapted;
    report.estimated_error = est.estimated_error;
    return report;
}

IntegralEstimate weight_l1_norm(const WeightField& n, const Mesh& mesh,
                                const QuadratureRule& quad) {
    SingularIntegrator engine(
        mesh, quad, [&](int e, Point p) { return weight_sample(n, mesh, e, p); },
        [&](int e, Point p) {
            double v;
            try {
                v = value_in_element(n.field(), mesh, e, p);
            } catch (const expr::eval_error&) {
                return true;
            }
            return !std::isfinite(v);
        });
    return engine.run();
}

WeizsackerTerm weizsacker_term(const WeightField& n, const Mesh& mesh,
                               const QuadratureRule& quad) {
    WeizsackerTerm out;
    auto vanish = [&](int e, Point p) { return weight_vanishes(n, mesh, e, p); };

    if (n.field().is_nodal()) {
        // P1 route: sqrt at the nodes for the left side, element-wise
        // gradients of the coefficients for the right side.
        const Eigen::VectorXd& coeffs = n.field().coefficients();
        Eigen::VectorXd root = coeffs.cwiseMax(0.0).cwiseSqrt();
        double lhs = 0.0;
        for (int e = 0; e < mesh.element_count(); ++e) {
            Point g = detail::p1_gradient(mesh, root, e);
            lhs += mesh.element_measures[e] * (g.x * g.x + g.y * g.y);
        }
        out.lhs = lhs;

        SingularIntegrator rhs_engine(
            mesh, quad,
            [&](int e, Point p) {
                Point g = detail::p1_gradient(mesh, coeffs, e);
                double g2 = g.x * g.x + g.y * g.y;
                double w = weight_sample(n, mesh, e, p);
                if (w < 1e-300) return g2 == 0.0 ? 0.0 : kInf;
                return 0.25 * g2 / w;
            },
            vanish);
        IntegralEstimate rhs = rhs_engine.run();
        out.rhs = rhs.value;
        out.rhs_divergent = rhs.divergent;
        return out;
    }

    auto weight_at = [&](Point p) {
        double v = n.field().expression_value(p.x, p.y);
        return v < 0.0 ? 0.0 : v;
    };
    FdGradient grad_root([&](Point p) { return std::sqrt(weight_at(p)); }, mesh, mesh.dim);
    FdGradient grad_weight(weight_at, mesh, mesh.dim);

    SingularIntegrator lhs_engine(
        mesh, quad,
        [&](int, Point p) {
            Point g = grad_root.at(p);
            return g.x * g.x + g.y * g.y;
        },
        vanish);
    IntegralEstimate lhs = lhs_engine.run();
    out.lhs = lhs.value;
    out.lhs_divergent = lhs.divergent;

    SingularIntegrator rhs_engine(
        mesh, quad,
        [&](int e, Point p) {
            Point g = grad_weight.at(p);
            double g2 = g.x * g.x + g.y * g.y;
            double w = weight_sample(n, mesh, e, p);
            if (w < 1e-300) return g2 == 0.0 ? 0.0 : kInf;
            return 0.25 * g2 / w;
        },
        vanish);
    IntegralEstimate rhs = rhs_engine.run();
    out.rhs = rhs.value;
    out.rhs_divergent = rhs.divergent;
    return out;
}

ForceIntegral force_integral(const std::vector<ScalarField>& dj, const WeightField& n,
                             const Mesh& mesh, const QuadratureRule& quad) {
    if (dj.empty() || static_cast<int>(dj.size()) != mesh.dim)
        throw std::invalid_argument("force_integral: one current component per dimension");

    SingularIntegrator engine(
        mesh, quad,
        [&](int e, Point p) {
            double mag2 = 0.0;
            for (const auto& component : dj) {
                double v = value_in_element(component, mesh, e, p);
                mag2 += v * v;
            }
            double w = weight_sample(n, mesh, e, p);
            if (w < 1e-300) return mag2 == 0.0 ? 0.0 : kInf;
            return mag2 / w;
        },
        [&](int e, Point p) { return weight_vanishes(n, mesh, e, p); });
    IntegralEstimate est = engine.run();

    ForceIntegral out;
    out.value = est.value;
    out.divergent = est.divergent;
    return out;
}

} // namespace wsturm
