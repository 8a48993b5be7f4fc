#include "wsturm/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>

namespace wsturm::expr {

namespace {

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr binary(NodeKind kind, NodePtr a, NodePtr b) {
    Node n;
    n.kind = kind;
    n.children = {std::move(a), std::move(b)};
    return make(std::move(n));
}

int function_arity(const std::string& name) {
    if (name == "pow") return 2;
    if (name == "sin" || name == "cos" || name == "exp" || name == "log" ||
        name == "sqrt" || name == "abs")
        return 1;
    return -1;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expression run() {
        NodePtr e = parse_expr();
        skip_space();
        if (pos_ != src_.size())
            throw parse_error("unexpected trailing input", pos_);
        return Expression(std::move(e));
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw parse_error(std::string("expected ") + what, pos_);
    }

    char peek() {
        skip_space();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = binary(NodeKind::add, std::move(lhs), parse_term());
            else if (accept('-'))
                lhs = binary(NodeKind::subtract, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            if (accept('*'))
                lhs = binary(NodeKind::multiply, std::move(lhs), parse_factor());
            else if (accept('/'))
                lhs = binary(NodeKind::divide, std::move(lhs), parse_factor());
            else
                return lhs;
        }
    }

    NodePtr parse_factor() {
        if (accept('-')) {
            Node n;
            n.kind = NodeKind::negate;
            n.children = {parse_factor()};
            return make(std::move(n));
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^'))
            return binary(NodeKind::power, std::move(base), parse_factor());
        return base;
    }

    NodePtr parse_primary() {
        skip_space();
        if (pos_ >= src_.size()) throw parse_error("unexpected end of input", pos_);
        char c = src_[pos_];

        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            expect(')', "')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw parse_error(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // 'e' belonged to something else; not part of the literal
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        double value = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size())
            throw parse_error("malformed number literal", start);
        Node n;
        n.kind = NodeKind::number;
        n.number = value;
        return make(std::move(n));
    }

    NodePtr parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));

        if (name == "pi") {
            Node n;
            n.kind = NodeKind::constant_pi;
            return make(std::move(n));
        }
        if (name == "x" || name == "y" || name == "t") {
            Node n;
            n.kind = NodeKind::variable;
            n.variable = name == "x" ? 0 : (name == "y" ? 1 : 2);
            return make(std::move(n));
        }

        int arity = function_arity(name);
        if (arity < 0) throw parse_error("unknown identifier '" + name + "'", start);

        expect('(', "'(' after function name");
        Node n;
        n.kind = NodeKind::call;
        n.function = name;
        n.children.push_back(parse_expr());
        while (accept(',')) n.children.push_back(parse_expr());
        expect(')', "')'");
        if (static_cast<int>(n.children.size()) != arity)
            throw parse_error("function '" + name + "' expects " + std::to_string(arity) +
                                  " argument(s)",
                              start);
        return make(std::move(n));
    }
};

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void unparse_node(const NodePtr& n, std::string& out) {
    switch (n->kind) {
    case NodeKind::number:
        out += format_number(n->number);
        break;
    case NodeKind::constant_pi:
        out += "pi";
        break;
    case NodeKind::variable:
        out += (n->variable == 0 ? "x" : (n->variable == 1 ? "y" : "t"));
        break;
    case NodeKind::negate:
        out += "(-";
        unparse_node(n->children[0], out);
        out += ')';
        break;
    case NodeKind::add:
    case NodeKind::subtract:
    case NodeKind::multiply:
    case NodeKind::divide:
    case NodeKind::power: {
        char op = n->kind == NodeKind::add        ? '+'
                  : n->kind == NodeKind::subtract ? '-'
                  : n->kind == NodeKind::multiply ? '*'
                  : n->kind == NodeKind::divide   ? '/'
                                                  : '^';
        out += '(';
        unparse_node(n->children[0], out);
        out += op;
        unparse_node(n->children[1], out);
        out += ')';
        break;
    }
    case NodeKind::call:
        out += n->function;
        out += '(';
        for (std::size_t i = 0; i < n->children.size(); ++i) {
            if (i) out += ',';
            unparse_node(n->children[i], out);
        }
        out += ')';
        break;
    }
}

bool identical_nodes(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case NodeKind::number:
        return a->number == b->number;
    case NodeKind::variable:
        return a->variable == b->variable;
    case NodeKind::call:
        if (a->function != b->function) return false;
        break;
    default:
        break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!identical_nodes(a->children[i], b->children[i])) return false;
    return true;
}

double eval_node(const NodePtr& n, double x, double y, double t) {
    switch (n->kind) {
    case NodeKind::number:
        return n->number;
    case NodeKind::constant_pi:
        return M_PI;
    case NodeKind::variable:
        return n->variable == 0 ? x : (n->variable == 1 ? y : t);
    case NodeKind::negate:
        return -eval_node(n->children[0], x, y, t);
    case NodeKind::add:
        return eval_node(n->children[0], x, y, t) + eval_node(n->children[1], x, y, t);
    case NodeKind::subtract:
        return eval_node(n->children[0], x, y, t) - eval_node(n->children[1], x, y, t);
    case NodeKind::multiply:
        return eval_node(n->children[0], x, y, t) * eval_node(n->children[1], x, y, t);
    case NodeKind::divide: {
        double num = eval_node(n->children[0], x, y, t);
        double den = eval_node(n->children[1], x, y, t);
        if (den == 0.0) throw eval_error("division by zero", x, y, t);
        return num / den;
    }
    case NodeKind::power: {
        double base = eval_node(n->children[0], x, y, t);
        double exponent = eval_node(n->children[1], x, y, t);
        double v = std::pow(base, exponent);
        if (!std::isfinite(v))
            throw eval_error("power produced a non-finite value", x, y, t);
        return v;
    }
    case NodeKind::call: {
        double a = eval_node(n->children[0], x, y, t);
        const std::string& f = n->function;
        if (f == "sin") return std::sin(a);
        if (f == "cos") return std::cos(a);
        if (f == "exp") return std::exp(a);
        if (f == "abs") return std::abs(a);
        if (f == "log") {
            if (a <= 0.0) throw eval_error("log of a non-positive argument", x, y, t);
            return std::log(a);
        }
        if (f == "sqrt") {
            if (a < 0.0) throw eval_error("sqrt of a negative argument", x, y, t);
            return std::sqrt(a);
        }
        // pow
        double b = eval_node(n->children[1], x, y, t);
        double v = std::pow(a, b);
        if (!std::isfinite(v)) throw eval_error("pow produced a non-finite value", x, y, t);
        return v;
    }
    }
    throw error("expression: corrupt node");
}

} // namespace

Expression parse(std::string_view source) { return Parser(source).run(); }

std::string unparse(const Expression& e) {
    if (e.empty()) return {};
    std::string out;
    unparse_node(e.root(), out);
    return out;
}

bool identical(const Expression& a, const Expression& b) {
    return identical_nodes(a.root(), b.root());
}

double evaluate(const Expression& e, double x, double y, double t) {
    if (e.empty()) throw error("expression: evaluating an empty expression");
    return eval_node(e.root(), x, y, t);
}

bool references_variable(const Expression& e, int variable) {
    std::function<bool(const NodePtr&)> walk = [&](const NodePtr& n) -> bool {
        if (!n) return false;
        if (n->kind == NodeKind::variable && n->variable == variable) return true;
        for (const auto& c : n->children)
            if (walk(c)) return true;
        return false;
    };
    return walk(e.root());
}

} // namespace wsturm::expr
