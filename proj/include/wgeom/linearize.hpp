#pragma once
//
// First-variation formulas under a metric perturbation g + t·h, the
// linearized Perelman map, a numeric t-derivative oracle that recomputes the
// perturbed geometry directly, and the adjoint-duality quadrature check.

#include "wgeom/report.hpp"
#include "wgeom/weighted.hpp"

namespace wgeom {

struct MetricPerturbation {
    SymTensorField h;
    double t_step = 1e-4;
};

// tr_g h as a scalar field with analytic partials assembled from metric and
// tensor partials (second derivatives need analytic h.d2 or FD fallback).
ScalarField trace_field(const MetricModel& m, const SymTensorField& h);

// δ_h Δf = −⟨∇²f, h⟩ − ⟨∇f, div h⟩ + ½⟨∇f, ∇ tr h⟩
double variation_laplacian_f(const WeightedSpace& ws, const MetricPerturbation& pert,
                             const ChartPoint& x);

// δ_h |∇f|² = −h(∇f, ∇f)
double variation_gradnorm(const WeightedSpace& ws, const MetricPerturbation& pert,
                          const ChartPoint& x);

// δ_h R = −Δ(tr h) + div(div h) − ⟨h, Ric⟩
double variation_scalar(const WeightedSpace& ws, const MetricPerturbation& pert,
                        const ChartPoint& x);

// δ_h ℛ_f = −Δ_f(tr h) − ⟨h, Ric_f⟩ + div_f(div_f h)
double linearized_perelman(const WeightedSpace& ws, const MetricPerturbation& pert,
                           const ChartPoint& x);

// The same variation through the expanded unweighted decomposition; must agree
// with linearized_perelman pointwise.
double linearized_perelman_expanded(const WeightedSpace& ws, const MetricPerturbation& pert,
                                    const ChartPoint& x);

enum class VariedQuantity { LaplacianF, GradNormF, ScalarCurv, PerelmanScalar };

// Model with metric g + t·h (analytic derivatives carried through when both
// sides have them).
MetricModel perturbed_model(const MetricModel& m, const SymTensorField& h, double t);

// Central t-derivative with one Richardson level; independent of the closed
// forms above.
double numeric_variation(const WeightedSpace& ws, const MetricPerturbation& pert,
                         VariedQuantity quantity, const ChartPoint& x);

// Verifies g + t·h stays positive definite over the grid for |t| ≤ t_step.
void require_spd_over_grid(const WeightedSpace& ws, const MetricPerturbation& pert,
                           const QuadratureGrid& grid);

// ⟨(δℛ_f)*u, h⟩_{L²_f} vs ⟨u, δ_hℛ_f⟩_{L²_f} by quadrature.
TwoSidedReport adjoint_duality_check(const WeightedSpace& ws, const ScalarField& u,
                                     const MetricPerturbation& pert, const QuadratureGrid& grid,
                                     double tolerance = 1e-6);

}  // namespace wgeom
