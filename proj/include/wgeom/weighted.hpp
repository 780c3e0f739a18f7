#pragma once
//
// Weighted operator stack on a smooth metric measure space (Σ, g, e^{-f}dVol):
// drift Laplacian, Bakry-Émery Ricci, Perelman scalar curvature, f-divergence
// and the formal adjoint of the linearized Perelman map.

#include "wgeom/geometry.hpp"
#include "wgeom/quadrature.hpp"

namespace wgeom {

struct WeightedSpace {
    MetricModel model;
    ScalarField density;  // the function f
};

// Function σ from the kernel-element structure relations; masked where df
// degenerates.
struct SigmaField {
    std::function<double(const ChartPoint&)> value;
    std::function<bool(const ChartPoint&)> mask;   // true where σ is defined
};

// Δ_f u = Δu − ⟨∇f, ∇u⟩.
double drift_laplacian(const WeightedSpace& ws, const ScalarField& u, const ChartPoint& x);

// Same operator via e^f div(e^{-f}∇u) expanded through the volume-element
// derivative; algebraically independent route used for cross-checking.
double drift_laplacian_divform(const WeightedSpace& ws, const ScalarField& u, const ChartPoint& x);

// Ric_f = Ric + ∇²f.
Mat bakry_emery_ricci(const WeightedSpace& ws, const ChartPoint& x);

// ℛ_f = R + 2Δf − |∇f|².
double perelman_scalar(const WeightedSpace& ws, const ChartPoint& x);

// dℛ_f as a covariant vector, by central differences of the pointwise value.
Vec d_perelman(const WeightedSpace& ws, const ChartPoint& x, double fd_step);

// ℛ_f packaged as a field with FD partials (for checks that differentiate it).
ScalarField perelman_scalar_field(const WeightedSpace& ws, double fd_step);

// div_f h = div h − h(∇f, ·).
Vec f_divergence_tensor(const WeightedSpace& ws, const SymTensorField& h, const ChartPoint& x);

// Iterated div_f(div_f h), fully expanded from analytic partials.
double f_div_f_div(const WeightedSpace& ws, const SymTensorField& h, const ChartPoint& x);

// div_f X = div X − ⟨X, ∇f⟩ for a contravariant vector field.
double f_divergence_vector(const WeightedSpace& ws, const VectorField& X, const ChartPoint& x);

// (δℛ_f)*u = −(Δ_f u) g + ∇²u − u Ric_f.
Mat adjoint_operator(const WeightedSpace& ws, const ScalarField& u, const ChartPoint& x);

// ∘T = T − (tr_g T / n) g for a component matrix at x.
Mat traceless_part(const Mat& g, const Mat& ginv, const Mat& T);
Mat traceless(const WeightedSpace& ws, const SymTensorField& T, const ChartPoint& x);

// sup over the grid of max|adjoint_operator| (kernel-membership residual).
double kernel_residual(const WeightedSpace& ws, const ScalarField& u, const QuadratureGrid& grid);

// Convenience forwarders with the weighted measure of this space.
double integrate(const WeightedSpace& ws, const QuadratureGrid& grid,
                 const std::function<double(const ChartPoint&)>& field);
double integrate_boundary(const WeightedSpace& ws, const BoundaryGrid& bgrid,
                          const std::function<double(const ChartPoint&)>& field);

}  // namespace wgeom
