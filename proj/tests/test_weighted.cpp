#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wgeom/metric.hpp"
#include "wgeom/weighted.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

WeightedSpace gaussian_space(int dim) {
    MetricModel m = make_model(json{{"name", "gaussian-chart"}, {"dim", dim}});
    return {m, make_density(m, json{{"name", "gaussian"}})};
}

WeightedSpace weighted_sphere(double vz) {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    return {m, make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, vz}}})};
}

}  // namespace

TEST_CASE("gaussian soliton: Ric_f = g and R_f = 2n - |x|^2") {
    for (int n : {2, 3}) {
        WeightedSpace ws = gaussian_space(n);
        QuadratureGrid grid = build_grid(ws.model, 5);
        for (const auto& p : grid.points) {
            Mat ricf = bakry_emery_ricci(ws, p);
            CHECK((ricf - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(perelman_scalar(ws, p) ==
                  doctest::Approx(2.0 * n - p.squaredNorm()).epsilon(1e-10));
        }
    }
}

TEST_CASE("gaussian coordinate functions are kernel elements") {
    WeightedSpace ws = gaussian_space(2);
    Vec v(2);
    v << 0.8, -0.6;
    ScalarField u = linear_ambient_field(ws.model, v);
    QuadratureGrid grid = build_grid(ws.model, 8);
    CHECK(kernel_residual(ws, u, grid) < 1e-8);
}

TEST_CASE("weighted sphere: drift eigenrelation and Bakry-Emery tensor") {
    // f = <x,v>, u_w = <x,w> with w perp v: Delta_f u = (-n + f) u,
    // Ric_f = (n - 1 - f) g, R_f = n(n-1) - 2nf - |v|^2 + f^2
    const double vz = 0.3;
    WeightedSpace ws = weighted_sphere(vz);
    Vec w(3);
    w << 1.0, 0.0, 0.0;
    ScalarField u = linear_ambient_field(ws.model, w);
    QuadratureGrid grid = build_grid(ws.model, 10);
    const int n = 2;
    for (const auto& p : grid.points) {
        const double f = ws.density.value(p);
        CHECK(drift_laplacian(ws, u, p) ==
              doctest::Approx((-n + f) * u.value(p)).epsilon(1e-9));
        Mat g = ws.model.metric_at(p);
        CHECK((bakry_emery_ricci(ws, p) - (n - 1.0 - f) * g).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(perelman_scalar(ws, p) ==
              doctest::Approx(n * (n - 1.0) - 2.0 * n * f - vz * vz + f * f).epsilon(1e-9));
    }
    CHECK(kernel_residual(ws, u, grid) < 1e-9);
}

TEST_CASE("two drift Laplacian routes agree") {
    WeightedSpace ws = weighted_sphere(0.45);
    ScalarField u = scalar_from_expr("sin(theta)*cos(phi) + 0.2*cos(theta)", ws.model.vars);
    QuadratureGrid grid = build_grid(ws.model, 8);
    for (const auto& p : grid.points)
        CHECK(drift_laplacian(ws, u, p) ==
              doctest::Approx(drift_laplacian_divform(ws, u, p)).epsilon(1e-7));
}

TEST_CASE("f-divergence of the metric matches -df") {
    // div_f g = -g(grad f, .) = -df as a one-form
    WeightedSpace ws = weighted_sphere(0.45);
    SymTensorField g_field;
    g_field.dim = 2;
    MetricModel m = ws.model;
    g_field.value = [m](const ChartPoint& x) { return m.metric_at(x); };
    g_field.d1 = [m](const ChartPoint& x) { return metric_d1_at(m, x); };
    g_field.d2 = [m](const ChartPoint& x) { return metric_d2_at(m, x); };
    QuadratureGrid grid = build_grid(m, 8);
    for (const auto& p : grid.points) {
        Vec lhs = f_divergence_tensor(ws, g_field, p);
        Vec df = scalar_d1(ws.density, p, m.fd_step);
        CHECK((lhs + df).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("adjoint of the Einstein sphere kills linear ambient functions") {
    // f = 0 on S^2: static potentials are the restrictions of linear functions
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    WeightedSpace ws{m, make_density(m, json{{"name", "zero"}})};
    Vec w(3);
    w << 0.2, -0.5, 1.0;
    ScalarField u = linear_ambient_field(m, w);
    QuadratureGrid grid = build_grid(m, 10);
    CHECK(kernel_residual(ws, u, grid) < 1e-9);
}
