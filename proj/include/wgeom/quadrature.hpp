#pragma once
//
// Quadrature grids in chart coordinates. Weights are coordinate-volume
// weights; the metric volume factor √det g is applied at evaluation time.
// Sphere models use Gauss-Legendre in cos θ × uniform φ, periodic directions
// use the trapezoid rule, boxes use tensor Gauss-Legendre.

#include <functional>
#include <string>
#include <vector>

#include "wgeom/fields.hpp"
#include "wgeom/metric.hpp"

namespace wgeom {

struct QuadratureGrid {
    std::vector<ChartPoint> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

struct BoundaryGrid {
    struct Component {
        std::string name;
        std::vector<Vec> params;
        std::vector<ChartPoint> points;
        std::vector<double> weights;   // (n-1)-dim coordinate weights; {1} for points
    };
    std::vector<Component> components;
};

// Nodes/weights of the N-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Volume grid adapted to the model's chart (nodes per axis).
QuadratureGrid build_grid(const MetricModel& m, int nodes);

// Boundary grid over every boundary component.
BoundaryGrid build_boundary_grid(const MetricModel& m, int nodes);

// ∫ field √det g dVol_coord over the grid (unweighted Riemannian measure).
double volume_integral(const MetricModel& m, const QuadratureGrid& grid,
                       const std::function<double(const ChartPoint&)>& field);

// ∫ field e^{-f} dVol.
double weighted_volume_integral(const MetricModel& m, const ScalarField& density,
                                const ScalarField& field, const QuadratureGrid& grid);
double weighted_volume_integral(const MetricModel& m, const ScalarField& density,
                                const QuadratureGrid& grid,
                                const std::function<double(const ChartPoint&)>& field);

// Induced boundary area element √det g_∂ at a boundary param point.
double boundary_area_factor(const MetricModel& m, const BoundaryComponent& comp, const Vec& param);

// ∫_{∂Σ} field e^{-f} dσ over one component.
double weighted_boundary_integral(const MetricModel& m, const ScalarField& density,
                                  const BoundaryGrid::Component& comp,
                                  const std::function<double(const ChartPoint&)>& field);

// Sum over all components.
double weighted_boundary_integral(const MetricModel& m, const ScalarField& density,
                                  const BoundaryGrid& bgrid,
                                  const std::function<double(const ChartPoint&)>& field);

}  // namespace wgeom
