#include "wgeom/boundary.hpp"

#include <cmath>

#include "wgeom/geometry.hpp"

namespace wgeom {

namespace {

Mat boundary_jacobian(const BoundaryComponent& comp, const Vec& param, int chart_dim) {
    if (comp.to_chart_d1) return comp.to_chart_d1(param);
    const double h = 1e-6;
    Mat jac(chart_dim, comp.param_dim);
    for (int a = 0; a < comp.param_dim; ++a) {
        Vec sp = param, sm = param;
        sp(a) += h;
        sm(a) -= h;
        jac.col(a) = (comp.to_chart(sp) - comp.to_chart(sm)) / (2.0 * h);
    }
    return jac;
}

// Chart model of the boundary component with the induced metric.
MetricModel induced_model(const MetricModel& m, const BoundaryComponent& comp) {
    MetricModel b;
    b.dim = comp.param_dim;
    b.name = m.name + ":" + comp.name;
    for (int a = 0; a < comp.param_dim; ++a) b.vars.push_back("s" + std::to_string(a));
    MetricModel outer = m;
    BoundaryComponent c = comp;
    b.metric_at = [outer, c](const ChartPoint& p) {
        ChartPoint y = c.to_chart(p);
        Mat jac = boundary_jacobian(c, p, outer.dim);
        return (jac.transpose() * outer.metric_at(y) * jac).eval();
    };
    b.chart_contains = [](const ChartPoint&) { return true; };
    b.fd_step = m.fd_step;
    return b;
}

// Density restricted to the boundary, first partials by the chain rule.
ScalarField restricted_density(const WeightedSpace& ws, const BoundaryComponent& comp) {
    WeightedSpace w = ws;
    BoundaryComponent c = comp;
    ScalarField fb;
    fb.value = [w, c](const ChartPoint& p) { return w.density.value(c.to_chart(p)); };
    fb.d1 = [w, c](const ChartPoint& p) {
        ChartPoint y = c.to_chart(p);
        Mat jac = boundary_jacobian(c, p, w.model.dim);
        return (jac.transpose() * scalar_d1(w.density, y, w.model.fd_step)).eval();
    };
    return fb;
}

double grad_norm_at(const MetricModel& m, const ScalarField& u, const ChartPoint& x) {
    MetricJet J = metric_jet(m, x, 0);
    Vec du = scalar_d1(u, x, m.fd_step);
    return std::sqrt(std::max(0.0, du.dot(J.ginv * du)));
}

}  // namespace

BoundaryPointData boundary_point_data(const WeightedSpace& ws, const BoundaryComponent& comp,
                                      const Vec& param) {
    BoundaryPointData d;
    const ChartPoint y = comp.to_chart(param);
    MetricJet J = metric_jet(ws.model, y, 1);
    d.normal = comp.outward_normal(y);
    d.normal_derivative_f = scalar_d1(ws.density, y, ws.model.fd_step).dot(d.normal);
    if (comp.param_dim == 0) {
        d.perelman_boundary = 0.0;
        d.mean_curvature = 0.0;
        d.second_form_norm = 0.0;
        return d;
    }
    MetricModel bm = induced_model(ws.model, comp);
    ScalarField fb = restricted_density(ws, comp);
    MetricJet Jb = metric_jet(bm, param, 0);
    Vec dfb = scalar_d1(fb, param, bm.fd_step);
    d.perelman_boundary = scalar_curvature(bm, param) + 2.0 * laplacian(bm, fb, param) -
                          dfb.dot(Jb.ginv * dfb);

    // second fundamental form A_ab = <grad_{e_a} nu, e_b> by FD of the normal
    const int pd = comp.param_dim;
    const int n = ws.model.dim;
    Mat jac = boundary_jacobian(comp, param, n);
    const double h = 1e-5;
    Mat A(pd, pd);
    for (int a = 0; a < pd; ++a) {
        Vec sp = param, sm = param;
        sp(a) += h;
        sm(a) -= h;
        Vec dnu = (comp.outward_normal(comp.to_chart(sp)) -
                   comp.outward_normal(comp.to_chart(sm))) /
                  (2.0 * h);
        Vec cov(n);  // (nabla_{e_a} nu)^k
        for (int k = 0; k < n; ++k) {
            double acc = dnu(k);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) acc += J.Gamma[k](i, j) * jac(i, a) * d.normal(j);
            cov(k) = acc;
        }
        for (int b = 0; b < pd; ++b) A(a, b) = cov.dot(J.g * jac.col(b));
    }
    A = 0.5 * (A + A.transpose());
    d.mean_curvature = (Jb.ginv * A).trace();
    d.second_form_norm = std::sqrt(std::max(0.0, (Jb.ginv * A * Jb.ginv * A).trace()));
    return d;
}

std::vector<SurfaceGravity> surface_gravity(const WeightedSpace& ws, const ScalarField& u,
                                            const BoundaryGrid& bgrid, double vanish_tolerance) {
    std::vector<SurfaceGravity> out;
    for (const auto& comp : bgrid.components) {
        SurfaceGravity sg;
        sg.component = comp.name;
        double lo = 0.0, hi = 0.0, sum = 0.0;
        bool first = true;
        for (const auto& y : comp.points) {
            const double uv = std::abs(u.value(y));
            if (uv > vanish_tolerance)
                throw NumericError("potential does not vanish on boundary component '" +
                                   comp.name + "' (|u| = " + std::to_string(uv) + ")");
            const double k = grad_norm_at(ws.model, u, y);
            lo = first ? k : std::min(lo, k);
            hi = first ? k : std::max(hi, k);
            sum += k;
            first = false;
        }
        sg.kappa = comp.points.empty() ? 0.0 : sum / comp.points.size();
        sg.variation = hi - lo;
        out.push_back(sg);
    }
    return out;
}

TwoSidedReport boundary_area_identity(const WeightedSpace& ws, const ScalarField& u,
                                      const QuadratureGrid& grid, const BoundaryGrid& bgrid,
                                      double tolerance, double positivity_tolerance) {
    double min_u = 0.0;
    bool first = true;
    for (const auto& x : grid.points) {
        const double uv = u.value(x);
        if (uv < -positivity_tolerance)
            throw NumericError("potential is negative in the interior (u = " +
                               std::to_string(uv) + ")");
        min_u = first ? uv : std::min(min_u, uv);
        first = false;
    }
    auto gravities = surface_gravity(ws, u, bgrid, positivity_tolerance);

    const int n = ws.model.dim;
    TwoSidedReport rep;
    rep.id = "boundary-area";
    rep.tolerance = tolerance;
    double lhs = 0.0;
    for (std::size_t a = 0; a < bgrid.components.size(); ++a) {
        const double area = weighted_boundary_integral(ws.model, ws.density, bgrid.components[a],
                                                       [](const ChartPoint&) { return 1.0; });
        lhs += (n - 1) * gravities[a].kappa * area;
        rep.diagnostics.emplace_back("kappa_" + gravities[a].component, gravities[a].kappa);
        rep.diagnostics.emplace_back("kappa_variation_" + gravities[a].component,
                                     gravities[a].variation);
    }
    rep.lhs = lhs;
    rep.rhs = integrate(ws, grid,
                        [&](const ChartPoint& x) { return perelman_scalar(ws, x) * u.value(x); });

    double stokes = 0.0;
    for (const auto& comp : bgrid.components) {
        const BoundaryComponent* bc = nullptr;
        for (const auto& c : ws.model.boundary)
            if (c.name == comp.name) bc = &c;
        if (!bc) throw ConfigError("boundary grid component '" + comp.name + "' has no model match");
        stokes += (n - 1) * weighted_boundary_integral(
                                ws.model, ws.density, comp, [&](const ChartPoint& y) {
                                    return scalar_d1(u, y, ws.model.fd_step)
                                        .dot(bc->outward_normal(y));
                                });
    }
    // Stokes form: (n-1) int <grad u, nu> dsigma_f = -int R_f u dVol_f
    rep.diagnostics.emplace_back("stokes_lhs", stokes);
    rep.diagnostics.emplace_back(
        "stokes_gap", std::abs(stokes + rep.rhs) / (1.0 + std::max(std::abs(stokes),
                                                                   std::abs(rep.rhs))));
    rep.diagnostics.emplace_back("min_interior_u", min_u);
    rep.diagnostics.emplace_back("kernel_residual", kernel_residual(ws, u, grid));
    rep.finalize();
    return rep;
}

TwoSidedReport pohozaev_schoen(const WeightedSpace& ws, const SymTensorField& T,
                               const VectorField& X, const QuadratureGrid& grid,
                               const BoundaryGrid& bgrid, double tolerance) {
    TwoSidedReport rep;
    rep.id = "pohozaev-schoen";
    rep.tolerance = tolerance;
    // boundary side needs the normal per component, so integrate per component
    double lhs = 0.0;
    for (const auto& comp : bgrid.components) {
        const BoundaryComponent* bc = nullptr;
        for (const auto& c : ws.model.boundary)
            if (c.name == comp.name) bc = &c;
        if (!bc) throw ConfigError("boundary grid component '" + comp.name + "' has no model match");
        lhs += weighted_boundary_integral(ws.model, ws.density, comp, [&](const ChartPoint& y) {
            return X.value(y).dot(T.value(y) * bc->outward_normal(y));
        });
    }
    rep.lhs = lhs;
    rep.rhs = integrate(ws, grid, [&](const ChartPoint& x) {
        MetricJet J = metric_jet(ws.model, x, 1);
        const int n = ws.model.dim;
        Vec Xv = X.value(x);
        Mat dX = vector_d1(X, x, ws.model.fd_step);
        Vec Xlow = J.g * Xv;
        Mat dXlow(n, n);  // dXlow(j, i) = d_i (g_jk X^k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int k = 0; k < n; ++k) acc += J.dg[i](j, k) * Xv(k) + J.g(j, k) * dX(k, i);
                dXlow(j, i) = acc;
            }
        Mat covX = covariant_d_oneform(J, Xlow, dXlow);
        Mat lie = covX + covX.transpose();
        return 0.5 * tensor_inner(J.ginv, T.value(x), lie) +
               f_divergence_tensor(ws, T, x).dot(Xv);
    });
    rep.finalize();
    return rep;
}

ResidualReport gauss_reduction_check(const WeightedSpace& ws, const BoundaryGrid& bgrid,
                                     const CheckOptions& opts) {
    ResidualReport rep;
    rep.identity_id = "gauss-reduction";
    rep.tolerance = opts.tolerance;
    double sup_a = 0.0, sup_dnu = 0.0, sum = 0.0;
    int count = 0;
    for (const auto& comp : bgrid.components) {
        const BoundaryComponent* bc = nullptr;
        for (const auto& c : ws.model.boundary)
            if (c.name == comp.name) bc = &c;
        if (!bc) throw ConfigError("boundary grid component '" + comp.name + "' has no model match");
        for (const auto& p : comp.params) {
            BoundaryPointData d = boundary_point_data(ws, *bc, p);
            const ChartPoint y = bc->to_chart(p);
            const double ricf_nn = d.normal.dot(bakry_emery_ricci(ws, y) * d.normal);
            const double hf = d.mean_curvature - d.normal_derivative_f;
            const double rhs = 0.5 * perelman_scalar(ws, y) - 0.5 * d.perelman_boundary +
                               0.5 * hf * hf -
                               0.5 * d.second_form_norm * d.second_form_norm;
            const double r = std::abs(ricf_nn - rhs);
            rep.sup_residual = std::max(rep.sup_residual, r);
            sum += r;
            ++count;
            sup_a = std::max(sup_a, d.second_form_norm);
            sup_dnu = std::max(sup_dnu, std::abs(d.normal_derivative_f));
        }
    }
    rep.grid_size = count;
    rep.mean_residual = count > 0 ? sum / count : 0.0;
    rep.diagnostics.emplace_back("second_form_sup", sup_a);
    rep.diagnostics.emplace_back("normal_density_derivative_sup", sup_dnu);
    rep.finalize();
    return rep;
}

InequalityReport thm1_estimate(const WeightedSpace& ws, const ScalarField& u, double c0, double c1,
                               const QuadratureGrid& grid, const BoundaryGrid& bgrid) {
    InequalityReport rep;
    rep.id = "thm1-area-estimate";
    auto gravities = surface_gravity(ws, u, bgrid);
    double lhs = 0.0, rhs = 0.0, sup_dnu = 0.0;
    for (std::size_t a = 0; a < bgrid.components.size(); ++a) {
        const auto& comp = bgrid.components[a];
        const BoundaryComponent* bc = nullptr;
        for (const auto& c : ws.model.boundary)
            if (c.name == comp.name) bc = &c;
        if (!bc) throw ConfigError("boundary grid component '" + comp.name + "' has no model match");
        const double area = weighted_boundary_integral(ws.model, ws.density, comp,
                                                       [](const ChartPoint&) { return 1.0; });
        lhs += (c0 + c1) * gravities[a].kappa * area;
        // R_f_boundary varies along the component, so integrate via params
        double acc = 0.0;
        for (std::size_t k = 0; k < comp.params.size(); ++k) {
            BoundaryPointData d = boundary_point_data(ws, *bc, comp.params[k]);
            sup_dnu = std::max(sup_dnu, std::abs(d.normal_derivative_f));
            const ChartPoint y = comp.points[k];
            const double areaf = boundary_area_factor(ws.model, *bc, comp.params[k]);
            acc += comp.weights[k] * areaf * std::exp(-ws.density.value(y)) *
                   (d.perelman_boundary - c1 * ws.density.value(y));
        }
        rhs += gravities[a].kappa * acc;
    }
    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.slack = rhs - lhs;
    rep.strict = rep.slack > 0.0;
    double fit = 0.0, min_u = 0.0;
    bool first = true;
    for (const auto& x : grid.points) {
        fit = std::max(fit, std::abs(perelman_scalar(ws, x) - c0 - c1 * ws.density.value(x)));
        const double uv = u.value(x);
        min_u = first ? uv : std::min(min_u, uv);
        first = false;
    }
    rep.diagnostics.emplace_back("scalar_fit_residual", fit);
    rep.diagnostics.emplace_back("normal_density_derivative_sup", sup_dnu);
    rep.diagnostics.emplace_back("min_interior_u", min_u);
    return rep;
}

}  // namespace wgeom
