#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace momentlab {

// Immutable arithmetic expression in a single variable.
//
// Grammar (highest precedence first):
//   primary := number | var | name '(' expr ')' | '(' expr ')'
//   power   := primary ['^' unary]          right associative
//   unary   := '-' unary | power
//   term    := unary {('*' | '/') unary}
//   expr    := term {('+' | '-') term}
// Functions: exp, log, abs, sqrt.
class Expr {
public:
    enum class Kind { Constant, Variable, Unary, Binary };
    enum class UnaryOp { Neg, Exp, Log, Abs, Sqrt };
    enum class BinaryOp { Add, Sub, Mul, Div, Pow };

    static Expr constant(double value);
    static Expr variable(char name = 'x');
    static Expr unary(UnaryOp op, Expr child);
    static Expr binary(BinaryOp op, Expr left, Expr right);

    Kind kind() const noexcept;
    double constant_value() const;
    char variable_name() const;
    UnaryOp unary_op() const;
    BinaryOp binary_op() const;
    const Expr& child() const;
    const Expr& left() const;
    const Expr& right() const;

    // Throws DomainError when a subexpression leaves the real domain.
    double eval(double value) const;

    // Fully parenthesized; parse(to_string()) is structurally equal to *this
    // for any tree with non-negative finite constants.
    std::string to_string() const;

    std::size_t depth() const;

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// Parses `text` with `variable` as the only admissible identifier that is not
// a function name. Throws SyntaxError.
Expr parse_expr(std::string_view text, char variable = 'x');

double eval_expr(const Expr& ast, double value);

} // namespace momentlab
