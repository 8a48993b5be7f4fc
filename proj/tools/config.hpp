#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <wsturm/expression.hpp>

namespace wsturm::cli {

/// Configuration problems (bad file, unknown keys, malformed expressions);
/// mapped to exit status 3.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field given either as an expression over x, y, t or as a nodal data
/// file of whitespace-separated "index value" lines.
struct FieldSpec {
    std::string source;       ///< original expression text, empty for files
    expr::Expression parsed;  ///< pre-parsed; configs fail before computing
    std::string file;

    bool present() const { return !source.empty() || !file.empty(); }
    bool is_file() const { return !file.empty(); }
};

struct DomainSpec {
    int dim = 1;
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;
};

struct MeshSpec {
    int mx = 1;
    int my = 1; ///< 2D only
    int refinements = 0;
};

struct SliceSpec {
    double t = 0.0;
    FieldSpec weight; ///< falls back to the top-level weight
    FieldSpec rhs;
    std::vector<FieldSpec> current;
    FieldSpec internal_force;
};

struct RunConfig {
    std::string command; ///< solve | eigen | constants | certify | convergence | timeseries
    DomainSpec domain;
    MeshSpec mesh;
    FieldSpec weight;
    FieldSpec rhs;
    FieldSpec exact;
    FieldSpec internal_force;
    std::vector<FieldSpec> current;
    int eigen_count = 6;
    double poincare_q = 2.0;
    std::vector<SliceSpec> slices;
    std::string output_prefix = "out";
    int quadrature_degree = 4;
    int threads = 1;
};

/// Loads and validates a JSON config. Unknown keys are errors.
RunConfig load_config(const std::string& path);

} // namespace wsturm::cli
