#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wgeom/boundary.hpp"
#include "wgeom/random_fields.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

struct HemisphereSetup {
    WeightedSpace ws;
    ScalarField u;
    QuadratureGrid grid;
    BoundaryGrid bgrid;
};

HemisphereSetup hemisphere(double vx) {
    MetricModel m = make_model(json{{"name", "hemisphere"}});
    ScalarField f = make_density(m, json{{"name", "linear"}, {"vector", {vx, 0.0, 0.0}}});
    Vec height(3);
    height << 0.0, 0.0, 1.0;
    return {{m, f}, linear_ambient_field(m, height), build_grid(m, 16),
            build_boundary_grid(m, 64)};
}

}  // namespace

TEST_CASE("surface gravity of the height function is exactly one") {
    HemisphereSetup hs = hemisphere(0.45);
    auto sg = surface_gravity(hs.ws, hs.u, hs.bgrid);
    REQUIRE(sg.size() == 1);
    CHECK(sg[0].kappa == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sg[0].variation < 1e-10);
}

TEST_CASE("surface gravity rejects a potential that misses the zero level") {
    HemisphereSetup hs = hemisphere(0.0);
    ScalarField bad = scalar_from_expr("cos(theta) + 0.1", hs.ws.model.vars);
    CHECK_THROWS_AS(surface_gravity(hs.ws, bad, hs.bgrid), NumericError);
}

TEST_CASE("boundary-area identity on the weighted hemisphere") {
    HemisphereSetup hs = hemisphere(0.45);
    TwoSidedReport rep = boundary_area_identity(hs.ws, hs.u, hs.grid, hs.bgrid);
    CHECK(rep.pass);
    CHECK(rep.relative_gap < 1e-9);
    CHECK(rep.lhs == doctest::Approx(rep.rhs).epsilon(1e-9));
}

TEST_CASE("boundary-area identity rejects sign-changing potentials") {
    HemisphereSetup hs = hemisphere(0.0);
    Vec side(3);
    side << 1.0, 0.0, 0.0;  // changes sign on the open hemisphere
    ScalarField bad = linear_ambient_field(hs.ws.model, side);
    CHECK_THROWS_AS(boundary_area_identity(hs.ws, bad, hs.grid, hs.bgrid), NumericError);
}

TEST_CASE("Pohozaev-Schoen with T = g reduces to the weighted divergence theorem") {
    HemisphereSetup hs = hemisphere(0.45);
    SymTensorField T = scalar_times_metric(hs.ws.model, constant_field(1.0));
    CounterRng rng(11);
    for (int d = 0; d < 10; ++d) {
        VectorField X = gradient_field(
            hs.ws.model, random_scalar(hs.ws.model, rng, d * kFieldCounterStride));
        TwoSidedReport rep = pohozaev_schoen(hs.ws, T, X, hs.grid, hs.bgrid);
        CHECK(rep.relative_gap < 1e-6);
    }
}

TEST_CASE("Pohozaev-Schoen with the Bakry-Emery tensor and gradient vector") {
    HemisphereSetup hs = hemisphere(0.45);
    SymTensorField T;
    T.dim = 2;
    WeightedSpace ws = hs.ws;
    T.value = [ws](const ChartPoint& x) { return bakry_emery_ricci(ws, x); };
    VectorField X = gradient_field(hs.ws.model, hs.u);
    TwoSidedReport rep = pohozaev_schoen(hs.ws, T, X, hs.grid, hs.bgrid, 1e-5);
    CHECK(rep.pass);
    CHECK(rep.relative_gap < 1e-5);
}

TEST_CASE("Gauss reduction of Ric_f(nu,nu) on hemisphere and interval") {
    HemisphereSetup hs = hemisphere(0.45);
    CheckOptions o;
    o.tolerance = 1e-8;
    ResidualReport rep = gauss_reduction_check(hs.ws, hs.bgrid, o);
    CHECK(rep.pass);

    MetricModel m = make_model(json{{"name", "interval"}, {"a", 0.0}, {"b", 1.0}});
    WeightedSpace ws{m, make_density(m, json{{"name", "expr"}, {"expr", "x^2/2 - x/3"}})};
    BoundaryGrid bg = build_boundary_grid(m, 1);
    ResidualReport rep1 = gauss_reduction_check(ws, bg, o);
    CHECK(rep1.pass);
}

TEST_CASE("interval surface gravity of a sine potential") {
    const double pi = 3.14159265358979323846;
    MetricModel m = make_model(json{{"name", "interval"}, {"a", 0.0}, {"b", pi}});
    WeightedSpace ws{m, make_density(m, json{{"name", "zero"}})};
    ScalarField u = scalar_from_expr("sin(x)", m.vars);
    auto sg = surface_gravity(ws, u, build_boundary_grid(m, 1));
    REQUIRE(sg.size() == 2);
    for (const auto& c : sg) CHECK(c.kappa == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("area estimate of the boundary theorem holds strictly") {
    HemisphereSetup hs = hemisphere(0.45);
    InequalityReport rep =
        thm1_estimate(hs.ws, hs.u, 2.0 - 0.45 * 0.45, -4.0, hs.grid, hs.bgrid);
    CHECK(rep.strict);
    CHECK(rep.slack > 0.0);
}
