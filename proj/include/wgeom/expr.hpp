#pragma once
//
// Small arithmetic expression trees with exact symbolic differentiation.
// Used for user-supplied metric/density expressions and for building smooth
// test fields whose chart derivatives must be analytic to any order.

#include <Eigen/Dense>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgeom::expr {

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log, Sqrt, Tanh };

struct Node {
    Kind kind;
    double value = 0.0;   // Const payload, or exponent for Pow
    int var = -1;         // Var payload
    ExprPtr a, b;
};

ExprPtr constant(double v);
ExprPtr var(int index);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr pow(ExprPtr a, double exponent);
ExprPtr neg(ExprPtr a);
ExprPtr sin(ExprPtr a);
ExprPtr cos(ExprPtr a);
ExprPtr exp(ExprPtr a);
ExprPtr log(ExprPtr a);
ExprPtr sqrt(ExprPtr a);
ExprPtr tanh(ExprPtr a);

double eval(const ExprPtr& e, const Eigen::VectorXd& x);
ExprPtr diff(const ExprPtr& e, int var);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grammar: + - * / ^ (constant exponent), unary minus, parentheses,
// functions sin cos exp log sqrt tanh, named variables from `vars`.
ExprPtr parse(const std::string& text, const std::vector<std::string>& vars);

}  // namespace wgeom::expr
