#include "wgeom/quadrature.hpp"

#include <cmath>

#include "wgeom/parallel.hpp"

namespace wgeom {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

namespace {

void tensor_box(const Vec& lo, const Vec& hi, int nodes, QuadratureGrid& grid) {
    const int n = static_cast<int>(lo.size());
    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);
    std::vector<int> idx(n, 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(nodes, n));
    grid.points.reserve(total);
    grid.weights.reserve(total);
    for (std::size_t c = 0; c < total; ++c) {
        ChartPoint p(n);
        double w = 1.0;
        std::size_t rem = c;
        for (int d = 0; d < n; ++d) {
            int k = static_cast<int>(rem % nodes);
            rem /= nodes;
            double half = 0.5 * (hi(d) - lo(d));
            p(d) = lo(d) + half * (gx[k] + 1.0);
            w *= gw[k] * half;
        }
        grid.points.push_back(p);
        grid.weights.push_back(w);
    }
}

void sphere_grid(double mu_lo, double mu_hi, int nodes, QuadratureGrid& grid) {
    std::vector<double> gx, gw;
    gauss_legendre(nodes, gx, gw);
    const int nphi = 2 * nodes;
    const double wphi = 2.0 * kPi / nphi;
    for (int i = 0; i < nodes; ++i) {
        const double half = 0.5 * (mu_hi - mu_lo);
        const double mu = mu_lo + half * (gx[i] + 1.0);
        const double theta = std::acos(mu);
        const double wmu = gw[i] * half;
        for (int j = 0; j < nphi; ++j) {
            ChartPoint p(2);
            p << theta, wphi * j;
            grid.points.push_back(p);
            // coordinate weight in (θ,φ): √det g = sin θ recovers wmu·wphi
            grid.weights.push_back(wmu * wphi / std::sin(theta));
        }
    }
}

}  // namespace

QuadratureGrid build_grid(const MetricModel& m, int nodes) {
    if (nodes < 1) throw ConfigError("grid nodes must be positive");
    QuadratureGrid grid;
    switch (m.grid_kind) {
        case GridKind::Box:
            tensor_box(m.box_lo, m.box_hi, nodes, grid);
            break;
        case GridKind::Sphere:
            sphere_grid(-1.0, 1.0, nodes, grid);
            break;
        case GridKind::Hemisphere:
            sphere_grid(0.0, 1.0, nodes, grid);
            break;
        case GridKind::Circle: {
            const double w = 2.0 * kPi / nodes;
            for (int i = 0; i < nodes; ++i) {
                grid.points.push_back(Vec::Constant(1, w * i));
                grid.weights.push_back(w);
            }
            break;
        }
        case GridKind::Interval: {
            std::vector<double> gx, gw;
            gauss_legendre(nodes, gx, gw);
            const double a = m.box_lo(0), b = m.box_hi(0), half = 0.5 * (b - a);
            for (int i = 0; i < nodes; ++i) {
                grid.points.push_back(Vec::Constant(1, a + half * (gx[i] + 1.0)));
                grid.weights.push_back(gw[i] * half);
            }
            break;
        }
    }
    for (const auto& p : grid.points)
        if (m.chart_contains && !m.chart_contains(p))
            throw NumericError("grid node fell outside chart domain of '" + m.name +
                               "'; reduce the node count or widen the chart band");
    return grid;
}

BoundaryGrid build_boundary_grid(const MetricModel& m, int nodes) {
    BoundaryGrid bg;
    for (const auto& comp : m.boundary) {
        BoundaryGrid::Component c;
        c.name = comp.name;
        if (comp.param_dim == 0) {
            c.params.push_back(Vec());
            c.points.push_back(comp.to_chart(Vec()));
            c.weights.push_back(1.0);
        } else if (comp.param_dim == 1 && comp.periodic) {
            const double lo = comp.param_lo(0), hi = comp.param_hi(0);
            const double w = (hi - lo) / nodes;
            for (int i = 0; i < nodes; ++i) {
                Vec s = Vec::Constant(1, lo + w * i);
                c.params.push_back(s);
                c.points.push_back(comp.to_chart(s));
                c.weights.push_back(w);
            }
        } else if (comp.param_dim == 1) {
            std::vector<double> gx, gw;
            gauss_legendre(nodes, gx, gw);
            const double a = comp.param_lo(0), b = comp.param_hi(0), half = 0.5 * (b - a);
            for (int i = 0; i < nodes; ++i) {
                Vec s = Vec::Constant(1, a + half * (gx[i] + 1.0));
                c.params.push_back(s);
                c.points.push_back(comp.to_chart(s));
                c.weights.push_back(gw[i] * half);
            }
        } else {
            throw ConfigError("boundary parameter dimension > 1 not supported");
        }
        bg.components.push_back(std::move(c));
    }
    return bg;
}

double volume_integral(const MetricModel& m, const QuadratureGrid& grid,
                       const std::function<double(const ChartPoint&)>& field) {
    return parallel_sum(static_cast<std::ptrdiff_t>(grid.size()), [&](std::ptrdiff_t i) {
        const auto& p = grid.points[static_cast<std::size_t>(i)];
        const double sg = std::sqrt(m.metric_at(p).determinant());
        return grid.weights[static_cast<std::size_t>(i)] * sg * field(p);
    });
}

double weighted_volume_integral(const MetricModel& m, const ScalarField& density,
                                const QuadratureGrid& grid,
                                const std::function<double(const ChartPoint&)>& field) {
    return parallel_sum(static_cast<std::ptrdiff_t>(grid.size()), [&](std::ptrdiff_t i) {
        const auto& p = grid.points[static_cast<std::size_t>(i)];
        const double sg = std::sqrt(m.metric_at(p).determinant());
        return grid.weights[static_cast<std::size_t>(i)] * sg * std::exp(-density.value(p)) *
               field(p);
    });
}

double weighted_volume_integral(const MetricModel& m, const ScalarField& density,
                                const ScalarField& field, const QuadratureGrid& grid) {
    return weighted_volume_integral(m, density, grid,
                                    [&](const ChartPoint& p) { return field.value(p); });
}

double boundary_area_factor(const MetricModel& m, const BoundaryComponent& comp, const Vec& param) {
    if (comp.param_dim == 0) return 1.0;
    const int d = comp.param_dim;
    const double h = 1e-6;
    ChartPoint x0 = comp.to_chart(param);
    Mat g = m.metric_at(x0);
    Mat gb(d, d);
    Mat jac(x0.size(), d);
    if (comp.to_chart_d1) {
        jac = comp.to_chart_d1(param);
    } else {
        for (int a = 0; a < d; ++a) {
            Vec sp = param, sm = param;
            sp(a) += h;
            sm(a) -= h;
            jac.col(a) = (comp.to_chart(sp) - comp.to_chart(sm)) / (2.0 * h);
        }
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) gb(a, b) = jac.col(a).dot(g * jac.col(b));
    return std::sqrt(gb.determinant());
}

double weighted_boundary_integral(const MetricModel& m, const ScalarField& density,
                                  const BoundaryGrid::Component& comp,
                                  const std::function<double(const ChartPoint&)>& field) {
    const BoundaryComponent* bc = nullptr;
    for (const auto& c : m.boundary)
        if (c.name == comp.name) bc = &c;
    if (!bc) throw ConfigError("boundary component '" + comp.name + "' not found on model");
    return parallel_sum(static_cast<std::ptrdiff_t>(comp.points.size()), [&](std::ptrdiff_t i) {
        const auto k = static_cast<std::size_t>(i);
        const double area = boundary_area_factor(m, *bc, comp.params[k]);
        return comp.weights[k] * area * std::exp(-density.value(comp.points[k])) *
               field(comp.points[k]);
    });
}

double weighted_boundary_integral(const MetricModel& m, const ScalarField& density,
                                  const BoundaryGrid& bgrid,
                                  const std::function<double(const ChartPoint&)>& field) {
    double acc = 0.0;
    for (const auto& c : bgrid.components) acc += weighted_boundary_integral(m, density, c, field);
    return acc;
}

}  // namespace wgeom
