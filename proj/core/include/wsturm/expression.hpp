#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wsturm/errors.hpp"

namespace wsturm::expr {

// Arithmetic mini-language over the variables x, y, t:
//
//   expr   := term (('+'|'-') term)*          left associative
//   term   := factor (('*'|'/') factor)*      left associative
//   factor := '-' factor | power
//   power  := primary ('^' factor)?           right associative
//   primary:= number | 'pi' | 'x'|'y'|'t' | name '(' expr {',' expr} ')' | '(' expr ')'
//
// so '^' binds tighter than unary minus, which binds tighter than '*'
// and '/'. Functions: sin, cos, exp, log, sqrt, abs (unary) and pow
// (binary). No user-defined functions, no conditionals.

enum class NodeKind {
    number,
    constant_pi,
    variable, // index 0=x, 1=y, 2=t
    negate,
    add,
    subtract,
    multiply,
    divide,
    power,
    call,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double number = 0.0;
    int variable = 0;
    std::string function;
    std::vector<NodePtr> children;
};

class Expression {
public:
    Expression() = default;
    explicit Expression(NodePtr root) : root_(std::move(root)) {}
    const NodePtr& root() const { return root_; }
    bool empty() const { return root_ == nullptr; }

private:
    NodePtr root_;
};

/// Parses `source`; throws parse_error with the offending offset.
Expression parse(std::string_view source);

/// Fully parenthesized canonical text; parse(unparse(e)) yields a tree
/// identical to e.
std::string unparse(const Expression& e);

/// Structural equality of syntax trees.
bool identical(const Expression& a, const Expression& b);

/// Evaluates at (x, y, t); throws eval_error on log/sqrt of a negative
/// argument, division by zero, or a pow producing a non-finite result
/// from finite inputs.
double evaluate(const Expression& e, double x, double y = 0.0, double t = 0.0);

/// True if any node references the variable (0=x, 1=y, 2=t).
bool references_variable(const Expression& e, int variable);

} // namespace wsturm::expr
