#include "momentlab/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "momentlab/error.hpp"

namespace momentlab {

struct Expr::Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    char variable = 'x';
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    std::vector<Expr> children;
};

namespace {

const char* function_name(Expr::UnaryOp op)
{
    switch (op) {
    case Expr::UnaryOp::Neg: return "-";
    case Expr::UnaryOp::Exp: return "exp";
    case Expr::UnaryOp::Log: return "log";
    case Expr::UnaryOp::Abs: return "abs";
    case Expr::UnaryOp::Sqrt: return "sqrt";
    }
    return "?";
}

char operator_symbol(Expr::BinaryOp op)
{
    switch (op) {
    case Expr::BinaryOp::Add: return '+';
    case Expr::BinaryOp::Sub: return '-';
    case Expr::BinaryOp::Mul: return '*';
    case Expr::BinaryOp::Div: return '/';
    case Expr::BinaryOp::Pow: return '^';
    }
    return '?';
}

std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

Expr Expr::constant(double value)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(char name)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->variable = name;
    return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Unary;
    n->unary = op;
    n->children.push_back(std::move(child));
    return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr left, Expr right)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Binary;
    n->binary = op;
    n->children.push_back(std::move(left));
    n->children.push_back(std::move(right));
    return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

double Expr::constant_value() const
{
    if (node_->kind != Kind::Constant)
        throw InvalidArgument("not a constant node");
    return node_->value;
}

char Expr::variable_name() const
{
    if (node_->kind != Kind::Variable)
        throw InvalidArgument("not a variable node");
    return node_->variable;
}

Expr::UnaryOp Expr::unary_op() const
{
    if (node_->kind != Kind::Unary)
        throw InvalidArgument("not a unary node");
    return node_->unary;
}

Expr::BinaryOp Expr::binary_op() const
{
    if (node_->kind != Kind::Binary)
        throw InvalidArgument("not a binary node");
    return node_->binary;
}

const Expr& Expr::child() const
{
    if (node_->kind != Kind::Unary)
        throw InvalidArgument("not a unary node");
    return node_->children[0];
}

const Expr& Expr::left() const
{
    if (node_->kind != Kind::Binary)
        throw InvalidArgument("not a binary node");
    return node_->children[0];
}

const Expr& Expr::right() const
{
    if (node_->kind != Kind::Binary)
        throw InvalidArgument("not a binary node");
    return node_->children[1];
}

double Expr::eval(double x) const
{
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Variable: return x;
    case Kind::Unary: {
        const double v = n.children[0].eval(x);
        switch (n.unary) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Exp: return std::exp(v);
        case UnaryOp::Abs: return std::fabs(v);
        case UnaryOp::Log:
            if (!(v > 0.0))
                throw DomainError(to_string());
            return std::log(v);
        case UnaryOp::Sqrt:
            if (v < 0.0)
                throw DomainError(to_string());
            return std::sqrt(v);
        }
        break;
    }
    case Kind::Binary: {
        const double a = n.children[0].eval(x);
        const double b = n.children[1].eval(x);
        double out = 0.0;
        switch (n.binary) {
        case BinaryOp::Add: out = a + b; break;
        case BinaryOp::Sub: out = a - b; break;
        case BinaryOp::Mul: out = a * b; break;
        case BinaryOp::Div:
            if (b == 0.0)
                throw DomainError(to_string());
            out = a / b;
            break;
        case BinaryOp::Pow: out = std::pow(a, b); break;
        }
        if (std::isnan(out) && !std::isnan(a) && !std::isnan(b))
            throw DomainError(to_string());
        return out;
    }
    }
    throw DomainError(to_string());
}

std::string Expr::to_string() const
{
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::Constant: return format_number(n.value);
    case Kind::Variable: return std::string(1, n.variable);
    case Kind::Unary:
        if (n.unary == UnaryOp::Neg)
            return "(-" + n.children[0].to_string() + ")";
        return std::string(function_name(n.unary)) + "(" + n.children[0].to_string() + ")";
    case Kind::Binary:
        return "(" + n.children[0].to_string() + " " + operator_symbol(n.binary) + " " +
               n.children[1].to_string() + ")";
    }
    return "?";
}

std::size_t Expr::depth() const
{
    std::size_t d = 0;
    for (const Expr& c : node_->children)
        d = std::max(d, c.depth());
    return d + 1;
}

bool operator==(const Expr& a, const Expr& b)
{
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.kind != y.kind)
        return false;
    switch (x.kind) {
    case Expr::Kind::Constant: return x.value == y.value;
    case Expr::Kind::Variable: return x.variable == y.variable;
    case Expr::Kind::Unary: return x.unary == y.unary && x.children[0] == y.children[0];
    case Expr::Kind::Binary:
        return x.binary == y.binary && x.children[0] == y.children[0] && x.children[1] == y.children[1];
    }
    return false;
}

namespace {

constexpr std::size_t kMaxNesting = 256;

class Parser {
public:
    Parser(std::string_view text, char variable) : text_(text), variable_(variable) {}

    Expr parse()
    {
        Expr e = expression();
        skip_space();
        if (pos_ < text_.size())
            fail("operator or end of input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& expected) const { throw SyntaxError(pos_ + 1, expected); }

    void skip_space()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser)
        {
            if (++p.depth_ > kMaxNesting)
                p.fail("shallower nesting (limit " + std::to_string(kMaxNesting) + ")");
        }
        ~DepthGuard() { --p.depth_; }
    };

    Expr expression()
    {
        DepthGuard guard(*this);
        Expr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = Expr::binary(Expr::BinaryOp::Add, std::move(lhs), term());
            else if (accept('-'))
                lhs = Expr::binary(Expr::BinaryOp::Sub, std::move(lhs), term());
            else
                return lhs;
        }
    }

    Expr term()
    {
        Expr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = Expr::binary(Expr::BinaryOp::Mul, std::move(lhs), unary());
            else if (accept('/'))
                lhs = Expr::binary(Expr::BinaryOp::Div, std::move(lhs), unary());
            else
                return lhs;
        }
    }

    Expr unary()
    {
        DepthGuard guard(*this);
        if (accept('-'))
            return Expr::unary(Expr::UnaryOp::Neg, unary());
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (accept('^'))
            return Expr::binary(Expr::BinaryOp::Pow, std::move(base), unary());
        return base;
    }

    Expr primary()
    {
        skip_space();
        if (pos_ >= text_.size())
            fail("number, variable, function or '('");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = expression();
            if (!accept(')'))
                fail("')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.')
            return number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
            return identifier();
        fail("number, variable, function or '('");
    }

    Expr number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            pos_ = start;
            fail("digit");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (digits() == 0)
                fail("exponent digits");
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
            pos_ = start;
            fail("finite number");
        }
        return Expr::constant(value);
    }

    Expr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')
                ++pos_;
            else
                break;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name.size() == 1 && name[0] == variable_)
            return Expr::variable(variable_);

        Expr::UnaryOp op;
        if (name == "exp")
            op = Expr::UnaryOp::Exp;
        else if (name == "log")
            op = Expr::UnaryOp::Log;
        else if (name == "abs")
            op = Expr::UnaryOp::Abs;
        else if (name == "sqrt")
            op = Expr::UnaryOp::Sqrt;
        else {
            pos_ = start;
            fail(std::string("variable '") + variable_ + "' or one of exp, log, abs, sqrt");
        }
        if (!accept('('))
            fail("'(' after function name");
        Expr arg = expression();
        if (!accept(')'))
            fail("')'");
        return Expr::unary(op, std::move(arg));
    }

    std::string_view text_;
    char variable_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
};

} // namespace

Expr parse_expr(std::string_view text, char variable)
{
    return Parser(text, variable).parse();
}

double eval_expr(const Expr& ast, double value) { return ast.eval(value); }

} // namespace momentlab
