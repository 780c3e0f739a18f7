#pragma once
//
// Chart-based manifold models: metric components with optional analytic
// derivatives, chart domain predicate, boundary parameterizations, and the
// built-in model registry.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgeom/expr.hpp"
#include "wgeom/fields.hpp"
#include "wgeom/types.hpp"

namespace wgeom {

struct BoundaryComponent {
    std::string name;
    int param_dim = 0;                 // 0 for interval endpoints
    Vec param_lo, param_hi;
    bool periodic = false;
    std::function<ChartPoint(const Vec&)> to_chart;
    // optional analytic Jacobian of to_chart, (chart dim) x param_dim;
    // FD fallback otherwise
    std::function<Mat(const Vec&)> to_chart_d1;
    // contravariant unit outward normal at a boundary chart point
    std::function<Vec(const ChartPoint&)> outward_normal;
};

enum class GridKind { Box, Sphere, Hemisphere, Circle, Interval };

struct MetricModel {
    int dim = 0;
    std::string name;
    std::vector<std::string> vars;     // coordinate names for expressions

    std::function<Mat(const ChartPoint&)> metric_at;
    std::function<Tensor3(const ChartPoint&)> metric_d1;   // optional
    std::function<Tensor4(const ChartPoint&)> metric_d2;   // optional
    std::function<bool(const ChartPoint&)> chart_contains;

    std::vector<BoundaryComponent> boundary;
    bool closed = false;
    double fd_step = 1e-5;

    // quadrature/grid hints
    GridKind grid_kind = GridKind::Box;
    Vec box_lo, box_hi;

    // embedding into R^m as symbolic expressions, when the model has one
    // (used to restrict linear ambient functions exactly)
    std::vector<expr::ExprPtr> embedding;

    bool has_analytic_metric() const {
        return static_cast<bool>(metric_d1) && static_cast<bool>(metric_d2);
    }
};

// Metric derivative access with FD fallback at model.fd_step.
Mat metric_value(const MetricModel& m, const ChartPoint& x);
Tensor3 metric_d1_at(const MetricModel& m, const ChartPoint& x);
Tensor4 metric_d2_at(const MetricModel& m, const ChartPoint& x);

void require_in_chart(const MetricModel& m, const ChartPoint& x);

MetricModel with_fd_step(MetricModel m, double h);

// --- registry -------------------------------------------------------------

std::vector<std::string> model_names();
MetricModel make_model(const nlohmann::json& spec);

// Density/potential presets: zero, linear (ambient vector through the
// embedding), gaussian (|x|^2/2 in chart coordinates), expr.
ScalarField make_density(const MetricModel& model, const nlohmann::json& spec);
std::vector<std::string> density_names();

// Restriction of the ambient linear function <x, w> through the embedding.
ScalarField linear_ambient_field(const MetricModel& model, const Vec& w);

}  // namespace wgeom
