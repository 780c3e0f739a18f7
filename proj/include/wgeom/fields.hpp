#pragma once
//
// Callable fields over a chart: scalars, vectors (contravariant components)
// and symmetric covariant 2-tensors. Analytic partials are optional; every
// accessor falls back to central finite differences of the value callable.

#include <functional>

#include "wgeom/expr.hpp"
#include "wgeom/types.hpp"

namespace wgeom {

struct ScalarField {
    std::function<double(const ChartPoint&)> value;
    std::function<Vec(const ChartPoint&)> d1;       // ∂_i u
    std::function<Mat(const ChartPoint&)> d2;       // ∂_i∂_j u
    std::function<Tensor3(const ChartPoint&)> d3;   // ∂_k∂_i∂_j u (rarely needed)

    bool analytic() const { return static_cast<bool>(d1) && static_cast<bool>(d2); }
};

struct VectorField {
    int dim = 0;
    std::function<Vec(const ChartPoint&)> value;    // X^i
    std::function<Mat(const ChartPoint&)> d1;       // d1(i,j) = ∂_j X^i
};

struct SymTensorField {
    int dim = 0;
    std::function<Mat(const ChartPoint&)> value;     // h_ij, symmetric
    std::function<Tensor3(const ChartPoint&)> d1;    // d1[k](i,j) = ∂_k h_ij
    std::function<Tensor4(const ChartPoint&)> d2;    // d2[l][k](i,j) = ∂_l∂_k h_ij

    bool analytic() const { return static_cast<bool>(d1) && static_cast<bool>(d2); }
};

// --- finite-difference fallbacks ------------------------------------------

Vec fd_gradient(const std::function<double(const ChartPoint&)>& f, const ChartPoint& x, double h);
Mat fd_hessian(const std::function<double(const ChartPoint&)>& f, const ChartPoint& x, double h);

// Derivative accessors: analytic partials when present, FD at step h otherwise.
Vec scalar_d1(const ScalarField& u, const ChartPoint& x, double h);
Mat scalar_d2(const ScalarField& u, const ChartPoint& x, double h);
Tensor3 scalar_d3(const ScalarField& u, const ChartPoint& x, double h);
Mat vector_d1(const VectorField& X, const ChartPoint& x, double h);
Tensor3 tensor_d1(const SymTensorField& T, const ChartPoint& x, double h);
Tensor4 tensor_d2(const SymTensorField& T, const ChartPoint& x, double h);

// --- constructors ---------------------------------------------------------

ScalarField constant_field(double c);
ScalarField scalar_from_callable(std::function<double(const ChartPoint&)> f);

// Expression-backed scalar with symbolic partials through third order.
ScalarField scalar_from_expr(const expr::ExprPtr& e, int dim);
ScalarField scalar_from_expr(const std::string& text, const std::vector<std::string>& vars);

// Scalar computed pointwise from other machinery; derivatives by FD at the
// given step (used for derived quantities like the weighted scalar curvature).
ScalarField derived_scalar(std::function<double(const ChartPoint&)> f, double fd_step);

// Tensor built from an n×n grid of expressions (symmetrized on evaluation).
SymTensorField tensor_from_exprs(const std::vector<std::vector<expr::ExprPtr>>& comp, int dim);

// Linear combinations keeping whatever analytic derivatives both terms carry.
ScalarField scalar_axpy(double a, const ScalarField& u, double b, const ScalarField& v);
SymTensorField tensor_scale(double a, const SymTensorField& T);

}  // namespace wgeom
