#pragma once
//
// Connection, curvature and tensor-calculus operators computed from metric
// components. All tensors are stored fully covariant; indices are raised
// explicitly through the inverse metric.

#include "wgeom/fields.hpp"
#include "wgeom/metric.hpp"
#include "wgeom/types.hpp"

namespace wgeom {

// Pointwise metric data shared by the operators below.
//   order 1: g, g^{-1}, dg, Gamma
//   order 2: additionally d2g, dGamma
struct MetricJet {
    Mat g, ginv;
    double sqrt_det = 0.0;
    Tensor3 dg;       // dg[k](i,j) = ∂_k g_ij
    Tensor4 d2g;      // d2g[l][k](i,j)
    Tensor3 Gamma;    // Gamma[k](i,j) = Γ^k_ij
    Tensor4 dGamma;   // dGamma[m][k](i,j) = ∂_m Γ^k_ij
};

MetricJet metric_jet(const MetricModel& m, const ChartPoint& x, int order);

// Levi-Civita connection coefficients Γ^k_ij.
Tensor3 christoffel(const MetricModel& m, const ChartPoint& x);

// Ricci tensor, signed so the round sphere is positive.
Mat ricci(const MetricModel& m, const ChartPoint& x);
double scalar_curvature(const MetricModel& m, const ChartPoint& x);

// Contravariant gradient g^{ij}∂_j u.
Vec gradient(const MetricModel& m, const ScalarField& u, const ChartPoint& x);

// Covariant Hessian ∇²u_ij = ∂_i∂_j u − Γ^k_ij ∂_k u.
Mat hessian(const MetricModel& m, const ScalarField& u, const ChartPoint& x);

// Geometer's Laplacian tr_g ∇²u (negative spectrum on closed models).
double laplacian(const MetricModel& m, const ScalarField& u, const ChartPoint& x);

double div_vector(const MetricModel& m, const VectorField& X, const ChartPoint& x);

// (div h)_j = g^{ik} ∇_i h_kj as a covariant vector.
Vec div_tensor(const MetricModel& m, const SymTensorField& h, const ChartPoint& x);

// ⟨A,B⟩_g for covariant 2-tensors given as component matrices.
double tensor_inner(const Mat& ginv, const Mat& A, const Mat& B);
double tensor_inner(const MetricModel& m, const SymTensorField& A, const SymTensorField& B,
                    const ChartPoint& x);

// Covariant derivative of a one-form from its components and partials:
// (∇ω)_ij = ∂_i ω_j − Γ^k_ij ω_k.
Mat covariant_d_oneform(const MetricJet& J, const Vec& omega, const Mat& domega);

// g-trace of ∇ω.
double div_oneform(const MetricJet& J, const Vec& omega, const Mat& domega);

// div(div h), fully expanded from metric and tensor partials.
double div_div_tensor(const MetricModel& m, const SymTensorField& h, const ChartPoint& x);

// Pieces of div(div h) at a point; shared with the weighted second divergence.
struct TensorDivJet {
    Vec div_h;     // (div h)_j
    Mat d_div_h;   // ∂_m (div h)_j  -> (j, m)
};
TensorDivJet tensor_div_jet(const MetricModel& m, const MetricJet& J, const SymTensorField& h,
                            const ChartPoint& x);

}  // namespace wgeom
