#pragma once
//
// Seeded band-limited random fields: trigonometric polynomials on box charts,
// polynomial restrictions through the embedding on spheres. Built on the
// expression engine so every derivative order is analytic, and on the
// counter RNG so draws are independent of evaluation order.

#include "wgeom/fields.hpp"
#include "wgeom/metric.hpp"
#include "wgeom/rng.hpp"

namespace wgeom {

// Smooth random scalar: ambient-polynomial restriction (degree ≤ max_degree)
// when the model has an embedding, low-frequency trig polynomial otherwise.
// Consumes counters [counter_base, counter_base + reserved_counters).
ScalarField random_scalar(const MetricModel& m, const CounterRng& rng, std::uint64_t counter_base,
                          int max_degree = 4);

// Stride reserved per random field draw (for building disjoint streams).
constexpr std::uint64_t kFieldCounterStride = 64;

// h = a·g from a scalar field and the model metric, derivatives included.
SymTensorField scalar_times_metric(const MetricModel& m, const ScalarField& a);

// Symmetrized dψ⊗dφ; requires third derivatives of the scalars (analytic for
// expression-backed fields).
SymTensorField grad_outer(const ScalarField& psi, const ScalarField& phi, int dim);

// Random symmetric tensor: a·g + dψ⊗dφ with random smooth scalars.
SymTensorField random_tensor(const MetricModel& m, const CounterRng& rng,
                             std::uint64_t counter_base, int max_degree = 4);

// Gradient vector field X = ∇ψ with analytic first derivatives.
VectorField gradient_field(const MetricModel& m, const ScalarField& psi);

// Smooth bump supported in |x - center| < radius (C^∞, identically zero
// outside); value and derivatives by closed form.
ScalarField bump_field(const Vec& center, double radius);

// Scalar product of two fields (derivatives through second order when both
// factors carry them).
ScalarField scalar_product(const ScalarField& a, const ScalarField& b);

}  // namespace wgeom
