#include "commands.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <wsturm/assembly.hpp>
#include <wsturm/errors.hpp>
#include <wsturm/integrals.hpp>
#include <wsturm/mesh.hpp>
#include <wsturm/norms.hpp>
#include <wsturm/slices.hpp>
#include <wsturm/solve.hpp>
#include <wsturm/spectra.hpp>

namespace wsturm::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw error("cannot open output file '" + path + "'");
        out_ << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

Mesh build_mesh(const RunConfig& config, int extra_refinements = 0) {
    Mesh mesh = config.domain.dim == 1
                    ? build_interval_mesh(config.domain.x0, config.domain.x1, config.mesh.mx)
                    : build_rectangle_mesh(config.domain.x0, config.domain.x1, config.domain.y0,
                                           config.domain.y1, config.mesh.mx, config.mesh.my);
    for (int r = 0; r < config.mesh.refinements + extra_refinements; ++r)
        mesh = refine_uniform(mesh);
    return mesh;
}

Eigen::VectorXd load_nodal_file(const std::string& path, const Mesh& mesh) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open nodal data file '" + path + "'");
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(mesh.node_count());
    long index;
    double value;
    while (in >> index >> value) {
        if (index < 0 || index >= mesh.node_count())
            throw config_error("nodal data file '" + path + "': index " +
                               std::to_string(index) + " out of range");
        coeffs[index] = value;
    }
    if (!in.eof())
        throw config_error("nodal data file '" + path +
                           "': expected whitespace-separated 'index value' lines");
    return coeffs;
}

ScalarField make_scalar(const FieldSpec& spec, const Mesh& mesh, double t) {
    if (spec.is_file()) return ScalarField::from_nodal(mesh, load_nodal_file(spec.file, mesh));
    expr::Expression e = spec.parsed;
    return ScalarField::from_expression(
        [e, t](double x, double y) { return expr::evaluate(e, x, y, t); });
}

WeightField make_weight(const FieldSpec& spec, const Mesh& mesh, double t) {
    if (spec.is_file()) return WeightField::from_nodal(mesh, load_nodal_file(spec.file, mesh));
    expr::Expression e = spec.parsed;
    return WeightField::from_expression(
        [e, t](double x, double y) { return expr::evaluate(e, x, y, t); });
}

std::string flag(bool b) { return b ? "1" : "0"; }

void print_certificate(const DensityCertificate& cert) {
    std::cout << "certify: nonnegative=" << flag(cert.nonnegative)
              << " l1_finite=" << flag(!cert.l1.divergent)
              << " inverse_square_integrable=" << flag(!cert.inverse_square.divergent);
    if (!cert.inverse_square.divergent)
        std::cout << " |n^-2|_1=" << fmt(cert.inverse_square.value);
    std::cout << "\n";
    if (!cert.nonnegative)
        std::cout << "certify: FAILED nonnegativity (min sample " << fmt(cert.min_sample)
                  << ")\n";
    if (cert.l1.divergent) std::cout << "certify: FAILED n in L1 (integral diverges)\n";
    if (cert.inverse_square.divergent)
        std::cout << "certify: FAILED n^-2 in L1 (integral diverges)\n";
}

int cmd_certify(const RunConfig& config) {
    Mesh mesh = build_mesh(config);
    QuadratureRule quad = default_rule(mesh.dim, config.quadrature_degree);
    WeightField weight = make_weight(config.weight, mesh, 0.0);
    DensityCertificate cert = certify_density(weight, mesh, quad);

    CsvWriter csv(config.output_prefix + "_certify.csv", "condition,passed,value");
    csv.row({"nonnegative", flag(cert.nonnegative), fmt(cert.min_sample)});
    csv.row({"l1_finite", flag(!cert.l1.divergent), fmt(cert.l1.value)});
    csv.row({"inverse_square_integrable", flag(!cert.inverse_square.divergent),
             fmt(cert.inverse_square.value)});
    print_certificate(cert);
    return cert.admissible() ? exit_ok : exit_admissibility;
}

void write_solution_csv(const std::string& path, const Mesh& mesh,
                        const Eigen::VectorXd& values) {
    if (mesh.dim == 1) {
        std::vector<int> order(mesh.node_count());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return mesh.nodes[a].x < mesh.nodes[b].x; });
        CsvWriter csv(path, "x,v");
        for (int i : order) csv.row({fmt(mesh.nodes[i].x), fmt(values[i])});
        return;
    }
    CsvWriter csv(path, "x,y,v");
    for (int i = 0; i < mesh.node_count(); ++i)
        csv.row({fmt(mesh.nodes[i].x), fmt(mesh.nodes[i].y), fmt(values[i])});
}

int cmd_solve(const RunConfig& config) {
    Mesh mesh = build_mesh(config);
    QuadratureRule quad = default_rule(mesh.dim, config.quadrature_degree);
    WeightField weight = make_weight(config.weight, mesh, 0.0);

    DensityCertificate cert = certify_density(weight, mesh, quad);
    if (!cert.admissible()) {
        print_certificate(cert);
        return exit_admissibility;
    }

    AssembledSystem sys = assemble_system(mesh, weight, make_scalar(config.rhs, mesh, 0.0), quad);
    WeakSolution solution = solve_weak(sys);
    write_solution_csv(config.output_prefix + "_solution.csv", mesh, solution.full);
    std::cout << "solve: elements=" << mesh.element_count() << " dofs=" << sys.size()
              << " residual=" << fmt(solution.residual)
              << (solution.conditioning_warning ? " conditioning_warning" : "") << "\n";
    return exit_ok;
}

int cmd_eigen(const RunConfig& config) {
    Mesh mesh = build_mesh(config);
    QuadratureRule quad = default_rule(mesh.dim, config.quadrature_degree);
    WeightField weight = make_weight(config.weight, mesh, 0.0);
    ScalarField zero = ScalarField::from_expression([](double, double) { return 0.0; });
    AssembledSystem sys = assemble_system(mesh, weight, zero, quad);

    EigenSequence seq = solve_eigenpairs(sys, config.eigen_count);
    CsvWriter csv(config.output_prefix + "_eigen.csv", "m,lambda");
    for (int m = 0; m < seq.count(); ++m)
        csv.row({std::to_string(m + 1), fmt(seq.values[m])});
    std::cout << "eigen: k=" << seq.count() << " lambda1=" << fmt(seq.values.front())
              << " max_residual=" << fmt(seq.max_residual)
              << (seq.conditioning_warning ? " conditioning_warning" : "") << "\n";
    return exit_ok;
}

int cmd_constants(const RunConfig& config) {
    Mesh mesh = build_mesh(config);
    QuadratureRule quad = default_rule(mesh.dim, config.quadrature_degree);
    WeightField weight = make_weight(config.weight, mesh, 0.0);

    ConstantsReport report = estimate_constants(mesh, weight, quad, config.poincare_q);
    CsvWriter csv(config.output_prefix + "_constants.csv", "name,value");
    csv.row({"poincare_q", fmt(report.poincare_q)});
    csv.row({"poincare", fmt(report.poincare)});
    csv.row({"poincare_heuristic", flag(report.poincare_heuristic)});
    csv.row({"hardy", fmt(report.hardy)});
    csv.row({"coercivity", fmt(report.coercivity)});
    csv.row({"continuity", fmt(report.continuity)});
    csv.row({"holder_embedding", fmt(report.holder_embedding)});
    csv.row({"holder_applicable", flag(report.holder_applicable)});
    std::cout << "constants: hardy=" << fmt(report.hardy)
              << " coercivity=" << fmt(report.coercivity)
              << " poincare(q=" << fmt(report.poincare_q) << ")=" << fmt(report.poincare)
              << "\n";
    return exit_ok;
}

// Tools-side finite-difference gradient of the exact solution expression.
double fd_partial(const expr::Expression& e, double t, Point p, int axis,
                  const DomainSpec& domain) {
    double c = axis == 0 ? p.x : p.y;
    double lo = axis == 0 ? domain.x0 : domain.y0;
    double hi = axis == 0 ? domain.x1 : domain.y1;
    double h = std::cbrt(DBL_EPSILON) * (1.0 + std::abs(c));
    auto value = [&](double s) {
        double x = axis == 0 ? s : p.x;
        double y = axis == 0 ? p.y : s;
        return expr::evaluate(e, x, y, t);
    };
    if (c - h >= lo && c + h <= hi) return (value(c + h) - value(c - h)) / (2.0 * h);
    if (c + h > hi) return (3.0 * value(c) - 4.0 * value(c - h) + value(c - 2.0 * h)) / (2.0 * h);
    return (-3.0 * value(c) + 4.0 * value(c + h) - value(c + 2.0 * h)) / (2.0 * h);
}

struct LevelErrors {
    double l2 = 0.0;
    double h1_weighted = 0.0;
};

LevelErrors manufactured_errors(const Mesh& mesh, const QuadratureRule& quad,
                                const Eigen::VectorXd& numeric, const expr::Expression& exact,
                                const WeightField& weight, const DomainSpec& domain) {
    double value_sq = 0.0;
    double grad_sq = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        double scale = mesh.dim == 1 ? mesh.element_measures[e] : 2.0 * mesh.element_measures[e];
        const auto& el = mesh.elements[e];
        std::array<Point, 3> pts{};
        for (int k = 0; k < mesh.nodes_per_element(); ++k) pts[k] = mesh.nodes[el[k]];
        double gx = 0.0, gy = 0.0;
        if (mesh.dim == 1) {
            double h = pts[1].x - pts[0].x;
            gx = (numeric[el[1]] - numeric[el[0]]) / h;
        } else {
            double det = (pts[1].x - pts[0].x) * (pts[2].y - pts[0].y) -
                         (pts[2].x - pts[0].x) * (pts[1].y - pts[0].y);
            std::array<Point, 3> grads = {
                Point{(pts[1].y - pts[2].y) / det, (pts[2].x - pts[1].x) / det},
                Point{(pts[2].y - pts[0].y) / det, (pts[0].x - pts[2].x) / det},
                Point{(pts[0].y - pts[1].y) / det, (pts[1].x - pts[0].x) / det}};
            for (int k = 0; k < 3; ++k) {
                gx += numeric[el[k]] * grads[k].x;
                gy += numeric[el[k]] * grads[k].y;
            }
        }
        for (int q = 0; q < quad.size(); ++q) {
            Point ref = quad.points[q];
            Point x = mesh.dim == 1
                          ? Point{pts[0].x + ref.x * (pts[1].x - pts[0].x), 0.0}
                          : Point{pts[0].x + ref.x * (pts[1].x - pts[0].x) +
                                      ref.y * (pts[2].x - pts[0].x),
                                  pts[0].y + ref.x * (pts[1].y - pts[0].y) +
                                      ref.y * (pts[2].y - pts[0].y)};
            std::array<double, 3> bary = mesh.dim == 1
                                             ? std::array<double, 3>{1.0 - ref.x, ref.x, 0.0}
                                             : std::array<double, 3>{1.0 - ref.x - ref.y, ref.x,
                                                                     ref.y};
            double vh_val = 0.0;
            for (int k = 0; k < mesh.nodes_per_element(); ++k)
                vh_val += bary[k] * numeric[el[k]];
            double diff = vh_val - expr::evaluate(exact, x.x, x.y, 0.0);
            value_sq += scale * quad.weights[q] * diff * diff;

            double dgx = gx - fd_partial(exact, 0.0, x, 0, domain);
            double dgy = mesh.dim == 2 ? gy - fd_partial(exact, 0.0, x, 1, domain) : 0.0;
            double w = evaluate(weight, x, mesh);
            if (w < 0.0) w = 0.0;
            grad_sq += scale * quad.weights[q] * w * (dgx * dgx + dgy * dgy);
        }
    }
    LevelErrors out;
    out.l2 = std::sqrt(value_sq);
    out.h1_weighted = std::sqrt(value_sq + grad_sq);
    return out;
}

int cmd_convergence(const RunConfig& config) {
    int levels = config.mesh.refinements + 1;
    std::vector<double> l2(levels), h1(levels), hsize(levels);
    std::vector<int> element_counts(levels);

    for (int level = 0; level < levels; ++level) {
        RunConfig level_config = config;
        level_config.mesh.refinements = 0;
        Mesh mesh = build_mesh(level_config, level);
        QuadratureRule quad = default_rule(mesh.dim, config.quadrature_degree);
        WeightField weight = make_weight(config.weight, mesh, 0.0);
        AssembledSystem sys =
            assemble_system(mesh, weight, make_scalar(config.rhs, mesh, 0.0), quad);
        WeakSolution solution = solve_weak(sys);

        LevelErrors errors = manufactured_errors(mesh, quad, solution.full, config.exact.parsed,
                                                 weight, config.domain);
        l2[level] = errors.l2;
        h1[level] = errors.h1_weighted;
        element_counts[level] = mesh.element_count();
        double diam = 0.0;
        for (int e = 0; e < mesh.element_count(); ++e)
            diam = std::max(diam, mesh.dim == 1 ? mesh.element_measures[e]
                                                : std::sqrt(mesh.element_measures[e]));
        hsize[level] = diam;
    }

    CsvWriter csv(config.output_prefix + "_convergence.csv",
                  "level,elements,h,l2_error,l2_order,h1_weighted_error,h1_weighted_order");
    for (int level = 0; level < levels; ++level) {
        std::string l2_order =
            level ? fmt(std::log2(l2[level - 1] / l2[level])) : std::string();
        std::string h1_order =
            level ? fmt(std::log2(h1[level - 1] / h1[level])) : std::string();
        csv.row({std::to_string(level), std::to_string(element_counts[level]),
                 fmt(hsize[level]), fmt(l2[level]), l2_order, fmt(h1[level]), h1_order});
        std::cout << "convergence: level=" << level << " elements=" << element_counts[level]
                  << " l2_error=" << fmt(l2[level])
                  << (level ? " order=" + l2_order : std::string()) << "\n";
    }
    return exit_ok;
}

int cmd_timeseries(const RunConfig& config) {
    Mesh mesh = build_mesh(config);

    std::vector<SliceProblem> problems;
    problems.reserve(config.slices.size());
    for (const SliceSpec& spec : config.slices) {
        SliceProblem problem;
        problem.t = spec.t;
        const FieldSpec& weight = spec.weight.present() ? spec.weight : config.weight;
        const FieldSpec& rhs = spec.rhs.present() ? spec.rhs : config.rhs;
        problem.density = make_weight(weight, mesh, spec.t);
        problem.load = make_scalar(rhs, mesh, spec.t);
        const std::vector<FieldSpec>& current =
            !spec.current.empty() ? spec.current : config.current;
        for (const FieldSpec& component : current)
            problem.current_rate.push_back(make_scalar(component, mesh, spec.t));
        const FieldSpec& q =
            spec.internal_force.present() ? spec.internal_force : config.internal_force;
        if (q.present()) problem.internal_force = make_scalar(q, mesh, spec.t);
        problems.push_back(std::move(problem));
    }

    SliceOptions options;
    options.quadrature_degree = config.quadrature_degree;
    std::vector<SliceReport> reports = run_time_series(problems, mesh, options);

    CsvWriter csv(config.output_prefix + "_series.csv",
                  "t,nonnegative,l1_finite,inverse_square_integrable,lambda1,hardy,"
                  "force_integral,residual");
    bool all_admissible = true;
    for (const SliceReport& report : reports) {
        all_admissible = all_admissible && report.certificate.admissible();
        std::string force;
        if (report.force)
            force = report.force->divergent ? "inf" : fmt(report.force->value);
        csv.row({fmt(report.t), flag(report.certificate.nonnegative),
                 flag(!report.certificate.l1.divergent),
                 flag(!report.certificate.inverse_square.divergent),
                 report.solved ? fmt(report.lambda1) : std::string(),
                 report.solved ? fmt(report.hardy) : std::string(), force,
                 report.solved ? fmt(report.solve_residual) : std::string()});
        std::cout << "slice t=" << fmt(report.t)
                  << " admissible=" << flag(report.certificate.admissible());
        if (report.solved) {
            std::cout << " lambda1=" << fmt(report.lambda1)
                      << " residual=" << fmt(report.solve_residual);
            if (report.consistency_residual)
                std::cout << " consistency_residual=" << fmt(*report.consistency_residual)
                          << (report.consistency_ok ? "" : " (INCONSISTENT)");
        }
        std::cout << "\n";
    }
    return all_admissible ? exit_ok : exit_admissibility;
}

} // namespace

int execute(const RunConfig& config) {
    if (config.command == "certify") return cmd_certify(config);
    if (config.command == "solve") return cmd_solve(config);
    if (config.command == "eigen") return cmd_eigen(config);
    if (config.command == "constants") return cmd_constants(config);
    if (config.command == "convergence") return cmd_convergence(config);
    if (config.command == "timeseries") return cmd_timeseries(config);
    throw config_error("unknown command '" + config.command + "'");
}

} // namespace wsturm::cli
