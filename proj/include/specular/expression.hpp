#pragma once

// Arithmetic expression trees over a declared variable list.
//
// Grammar (left-associative + - * /, right-associative ^, unary minus binds
// tighter than ^ so "-x^2" is (-x)^2):
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' factor)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom
//
// Evaluation follows IEEE semantics: division by zero and domain violations
// produce inf/NaN, which callers treat as "undefined here". Parsing validates
// every identifier, so a constructed tree never references an undeclared
// variable or unknown function.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace specular {

enum class Fn { Abs, Sgn, Sqrt, Exp, Ln, Sin, Cos, Tan, Atan };

class Expression {
public:
    static Expression parse(std::string_view text, std::span<const std::string> variables);

    double eval(std::span<const double> vars) const { return eval_node(root_, vars); }

    double eval1(double x) const {
        const double v[1] = {x};
        return eval_node(root_, std::span<const double>(v, 1));
    }

    const std::string& source() const { return source_; }

    // True when the tree contains sgn, the one grammar function that is
    // discontinuous on its domain. Limit code uses this to decide whether
    // endpoint evaluation can stand in for a one-sided limit.
    bool has_discontinuous_function() const {
        for (const Node& n : nodes_)
            if (n.op == Op::Call && n.fn == Fn::Sgn) return true;
        return false;
    }

private:
    enum class Op { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

    struct Node {
        Op op;
        double number = 0.0;
        int var = -1;
        Fn fn = Fn::Abs;
        int a = -1, b = -1;
    };

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string source_;

    double eval_node(int idx, std::span<const double> vars) const {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        switch (n.op) {
        case Op::Number: return n.number;
        case Op::Var: return vars[static_cast<std::size_t>(n.var)];
        case Op::Add: return eval_node(n.a, vars) + eval_node(n.b, vars);
        case Op::Sub: return eval_node(n.a, vars) - eval_node(n.b, vars);
        case Op::Mul: return eval_node(n.a, vars) * eval_node(n.b, vars);
        case Op::Div: return eval_node(n.a, vars) / eval_node(n.b, vars);
        case Op::Pow: return std::pow(eval_node(n.a, vars), eval_node(n.b, vars));
        case Op::Neg: return -eval_node(n.a, vars);
        case Op::Call: {
            double x = eval_node(n.a, vars);
            switch (n.fn) {
            case Fn::Abs: return std::fabs(x);
            case Fn::Sgn: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
            case Fn::Sqrt: return std::sqrt(x);
            case Fn::Exp: return std::exp(x);
            case Fn::Ln: return std::log(x);
            case Fn::Sin: return std::sin(x);
            case Fn::Cos: return std::cos(x);
            case Fn::Tan: return std::tan(x);
            case Fn::Atan: return std::atan(x);
            }
            return std::nan("");
        }
        }
        return std::nan("");
    }

    friend class ExprParser;
};

class ExprParser {
public:
    ExprParser(std::string_view text, std::span<const std::string> variables)
        : text_(text), vars_(variables) {}

    Expression run() {
        Expression e;
        e.source_ = std::string(text_);
        out_ = &e;
        pos_ = 0;
        e.root_ = parse_expr(0);
        skip_ws();
        if (pos_ != text_.size()) throw syntax_error(pos_, "end of input");
        out_ = nullptr;
        return e;
    }

private:
    std::string_view text_;
    std::span<const std::string> vars_;
    std::size_t pos_ = 0;
    Expression* out_ = nullptr;

    static constexpr int kMaxDepth = 512;

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    int add(Expression::Node n) {
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    int parse_expr(int depth) {
        if (depth > kMaxDepth) throw syntax_error(pos_, "shallower nesting");
        int lhs = parse_term(depth + 1);
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            int rhs = parse_term(depth + 1);
            Expression::Node n;
            n.op = c == '+' ? Expression::Op::Add : Expression::Op::Sub;
            n.a = lhs;
            n.b = rhs;
            lhs = add(n);
        }
    }

    int parse_term(int depth) {
        int lhs = parse_factor(depth + 1);
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            int rhs = parse_factor(depth + 1);
            Expression::Node n;
            n.op = c == '*' ? Expression::Op::Mul : Expression::Op::Div;
            n.a = lhs;
            n.b = rhs;
            lhs = add(n);
        }
    }

    int parse_factor(int depth) {
        if (depth > kMaxDepth) throw syntax_error(pos_, "shallower nesting");
        int base = parse_atom(depth + 1);
        if (peek() == '^') {
            ++pos_;
            int exp = parse_factor(depth + 1);
            Expression::Node n;
            n.op = Expression::Op::Pow;
            n.a = base;
            n.b = exp;
            return add(n);
        }
        return base;
    }

    int parse_atom(int depth) {
        if (depth > kMaxDepth) throw syntax_error(pos_, "shallower nesting");
        skip_ws();
        if (pos_ >= text_.size()) throw syntax_error(pos_, "number, identifier, '(' or '-'");
        char c = text_[pos_];

        if (c == '-') {
            ++pos_;
            int inner = parse_atom(depth + 1);
            Expression::Node n;
            n.op = Expression::Op::Neg;
            n.a = inner;
            return add(n);
        }
        if (c == '(') {
            ++pos_;
            int inner = parse_expr(depth + 1);
            if (!eat(')')) throw syntax_error(pos_, "')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident(depth);
        throw syntax_error(pos_, "number, identifier, '(' or '-'");
    }

    int parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
            throw syntax_error(start, "digits");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() &&
                std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // bare 'e' is not an exponent
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc{}) throw syntax_error(start, "valid number");
        Expression::Node n;
        n.op = Expression::Op::Number;
        n.number = value;
        return add(n);
    }

    int parse_ident(int depth) {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));

        if (peek() == '(') {
            std::size_t paren = pos_;
            ++pos_;
            int arg = parse_expr(depth + 1);
            if (peek() == ',')
                throw syntax_error(paren, "1 argument for " + name);
            if (!eat(')')) throw syntax_error(pos_, "')'");
            Fn fn;
            if (name == "abs") fn = Fn::Abs;
            else if (name == "sgn") fn = Fn::Sgn;
            else if (name == "sqrt") fn = Fn::Sqrt;
            else if (name == "exp") fn = Fn::Exp;
            else if (name == "ln") fn = Fn::Ln;
            else if (name == "sin") fn = Fn::Sin;
            else if (name == "cos") fn = Fn::Cos;
            else if (name == "tan") fn = Fn::Tan;
            else if (name == "atan") fn = Fn::Atan;
            else throw unknown_function(name);
            Expression::Node n;
            n.op = Expression::Op::Call;
            n.fn = fn;
            n.a = arg;
            return add(n);
        }

        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                Expression::Node n;
                n.op = Expression::Op::Var;
                n.var = static_cast<int>(i);
                return add(n);
            }
        }
        throw syntax_error(start, "declared variable, got '" + name + "'");
    }
};

inline Expression Expression::parse(std::string_view text,
                                    std::span<const std::string> variables) {
    return ExprParser(text, variables).run();
}

} // namespace specular
