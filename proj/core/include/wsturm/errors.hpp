#pragma once

#include <stdexcept>
#include <string>

namespace wsturm {

/// Base class for all failures raised by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A weight was negative where it must not be, or a density failed the
/// admissibility certificate in a context that requires it.
class admissibility_error : public error {
public:
    using error::error;
};

/// An integrand was detected to be non-integrable (load assembly).
class divergence_error : public error {
public:
    using error::error;
};

/// Factorization failure, indefiniteness, or eigen-iteration non-convergence.
class solver_error : public error {
public:
    using error::error;
};

namespace expr {

/// Syntax error while parsing an expression; carries the source offset.
class parse_error : public wsturm::error {
public:
    parse_error(const std::string& what, std::size_t position)
        : wsturm::error(what), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Domain error while evaluating an expression (log/sqrt of a negative
/// argument, division by zero); carries the offending point.
class eval_error : public wsturm::error {
public:
    eval_error(const std::string& what, double x, double y, double t)
        : wsturm::error(what), x_(x), y_(y), t_(t) {}
    double x() const { return x_; }
    double y() const { return y_; }
    double t() const { return t_; }

private:
    double x_, y_, t_;
};

} // namespace expr
} // namespace wsturm
