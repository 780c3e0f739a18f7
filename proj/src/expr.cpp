#include "wgeom/expr.hpp"

#include <cctype>
#include <cmath>

namespace wgeom::expr {

namespace {

bool is_const(const ExprPtr& e, double v) { return e->kind == Kind::Const && e->value == v; }

ExprPtr make(Kind k, ExprPtr a = nullptr, ExprPtr b = nullptr, double value = 0.0, int var = -1) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = value;
    n->var = var;
    return n;
}

}  // namespace

ExprPtr constant(double v) { return make(Kind::Const, nullptr, nullptr, v); }
ExprPtr var(int index) { return make(Kind::Var, nullptr, nullptr, 0.0, index); }

ExprPtr add(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return constant(a->value + b->value);
    return make(Kind::Add, std::move(a), std::move(b));
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
    if (is_const(b, 0.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return constant(a->value - b->value);
    if (is_const(a, 0.0)) return neg(std::move(b));
    return make(Kind::Sub, std::move(a), std::move(b));
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return constant(a->value * b->value);
    return make(Kind::Mul, std::move(a), std::move(b));
}

ExprPtr div(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0)) return constant(0.0);
    if (is_const(b, 1.0)) return a;
    if (a->kind == Kind::Const && b->kind == Kind::Const) return constant(a->value / b->value);
    return make(Kind::Div, std::move(a), std::move(b));
}

ExprPtr pow(ExprPtr a, double exponent) {
    if (exponent == 0.0) return constant(1.0);
    if (exponent == 1.0) return a;
    if (a->kind == Kind::Const) return constant(std::pow(a->value, exponent));
    return make(Kind::Pow, std::move(a), nullptr, exponent);
}

ExprPtr neg(ExprPtr a) {
    if (a->kind == Kind::Const) return constant(-a->value);
    return make(Kind::Neg, std::move(a));
}

ExprPtr sin(ExprPtr a) { return make(Kind::Sin, std::move(a)); }
ExprPtr cos(ExprPtr a) { return make(Kind::Cos, std::move(a)); }
ExprPtr exp(ExprPtr a) { return make(Kind::Exp, std::move(a)); }
ExprPtr log(ExprPtr a) { return make(Kind::Log, std::move(a)); }
ExprPtr sqrt(ExprPtr a) { return make(Kind::Sqrt, std::move(a)); }
ExprPtr tanh(ExprPtr a) { return make(Kind::Tanh, std::move(a)); }

double eval(const ExprPtr& e, const Eigen::VectorXd& x) {
    switch (e->kind) {
        case Kind::Const: return e->value;
        case Kind::Var: return x(e->var);
        case Kind::Add: return eval(e->a, x) + eval(e->b, x);
        case Kind::Sub: return eval(e->a, x) - eval(e->b, x);
        case Kind::Mul: return eval(e->a, x) * eval(e->b, x);
        case Kind::Div: return eval(e->a, x) / eval(e->b, x);
        case Kind::Pow: return std::pow(eval(e->a, x), e->value);
        case Kind::Neg: return -eval(e->a, x);
        case Kind::Sin: return std::sin(eval(e->a, x));
        case Kind::Cos: return std::cos(eval(e->a, x));
        case Kind::Exp: return std::exp(eval(e->a, x));
        case Kind::Log: return std::log(eval(e->a, x));
        case Kind::Sqrt: return std::sqrt(eval(e->a, x));
        case Kind::Tanh: return std::tanh(eval(e->a, x));
    }
    return 0.0;
}

ExprPtr diff(const ExprPtr& e, int v) {
    switch (e->kind) {
        case Kind::Const: return constant(0.0);
        case Kind::Var: return constant(e->var == v ? 1.0 : 0.0);
        case Kind::Add: return add(diff(e->a, v), diff(e->b, v));
        case Kind::Sub: return sub(diff(e->a, v), diff(e->b, v));
        case Kind::Mul: return add(mul(diff(e->a, v), e->b), mul(e->a, diff(e->b, v)));
        case Kind::Div:
            return div(sub(mul(diff(e->a, v), e->b), mul(e->a, diff(e->b, v))), mul(e->b, e->b));
        case Kind::Pow:
            return mul(mul(constant(e->value), pow(e->a, e->value - 1.0)), diff(e->a, v));
        case Kind::Neg: return neg(diff(e->a, v));
        case Kind::Sin: return mul(cos(e->a), diff(e->a, v));
        case Kind::Cos: return neg(mul(sin(e->a), diff(e->a, v)));
        case Kind::Exp: return mul(exp(e->a), diff(e->a, v));
        case Kind::Log: return div(diff(e->a, v), e->a);
        case Kind::Sqrt: return div(diff(e->a, v), mul(constant(2.0), sqrt(e->a)));
        case Kind::Tanh: return mul(sub(constant(1.0), mul(tanh(e->a), tanh(e->a))), diff(e->a, v));
    }
    return constant(0.0);
}

namespace {

class Parser {
  public:
    Parser(const std::string& text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars) {}

    ExprPtr run() {
        auto e = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return e;
    }

  private:
    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("expression parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
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

    ExprPtr expression() {
        auto e = term();
        for (;;) {
            if (eat('+')) e = add(e, term());
            else if (eat('-')) e = sub(e, term());
            else return e;
        }
    }

    ExprPtr term() {
        auto e = factor();
        for (;;) {
            if (eat('*')) e = mul(e, factor());
            else if (eat('/')) e = div(e, factor());
            else return e;
        }
    }

    ExprPtr factor() {
        auto e = unary();
        if (eat('^')) {
            bool negated = eat('-');
            auto ex = number();
            e = pow(e, negated ? -ex : ex);
        }
        return e;
    }

    ExprPtr unary() {
        if (eat('-')) return neg(unary());
        return primary();
    }

    double number() {
        skip_ws();
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(text_.substr(pos_), &used);
        } catch (const std::exception&) {
            fail("expected number");
        }
        pos_ += used;
        return v;
    }

    ExprPtr primary() {
        char c = peek();
        if (c == '(') {
            eat('(');
            auto e = expression();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return constant(number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                name += text_[pos_++];
            }
            if (eat('(')) {
                auto arg = expression();
                if (!eat(')')) fail("expected ')' after " + name);
                if (name == "sin") return sin(arg);
                if (name == "cos") return cos(arg);
                if (name == "exp") return exp(arg);
                if (name == "log") return log(arg);
                if (name == "sqrt") return sqrt(arg);
                if (name == "tanh") return tanh(arg);
                fail("unknown function '" + name + "'");
            }
            if (name == "pi") return constant(3.14159265358979323846);
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (vars_[i] == name) return var(static_cast<int>(i));
            }
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected character");
    }
};

}  // namespace

ExprPtr parse(const std::string& text, const std::vector<std::string>& vars) {
    return Parser(text, vars).run();
}

}  // namespace wgeom::expr
