#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wgeom/identities.hpp"
#include "wgeom/random_fields.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

double diag(const ResidualReport& r, const std::string& key) {
    for (const auto& [k, v] : r.diagnostics)
        if (k == key) return v;
    FAIL("missing diagnostic ", key);
    return 0.0;
}

}  // namespace

TEST_CASE("identity suite on the Gaussian soliton") {
    MetricModel m = make_model(json{{"name", "gaussian-chart"}, {"dim", 2}});
    WeightedSpace ws{m, make_density(m, json{{"name", "gaussian"}})};
    ScalarField u = scalar_from_expr("0.6*x - 0.3*y", m.vars);
    QuadratureGrid grid = build_grid(m, 8);
    CheckOptions o;

    CHECK(check_weighted_bianchi(ws, grid, o).pass);
    CHECK(check_divf_gtrace(ws, u, grid, o).pass);
    CHECK(check_divf_hessian(ws, u, grid, o).pass);
    CHECK(check_kernel_consequence(ws, u, grid, o).pass);
    auto [sigma, sig_rep] = extract_sigma(ws, u, grid, o);
    CHECK(sig_rep.pass);
    CHECK(check_log_identity(ws, u, sigma, grid, o).pass);
    CHECK(check_expander_trace(ws, 1.0, 0.0, 4.0, -2.0, grid, o).pass);
    CHECK(check_traceless_static(ws, u, grid, o).pass);
    CHECK(check_traceless_divergence(ws, grid, o).pass);
    CheckOptions ob = o;
    ob.tolerance = 1e-4;
    CHECK(check_weighted_bochner(ws, ws.density, grid, ob).pass);
    CheckOptions os = o;
    os.specialized_form = true;
    ResidualReport td =
        check_tensor_field_divergence(ws, scalar_times_metric(m, constant_field(1.0)), u, grid, os);
    CHECK(td.pass);
    CheckOptions ot = o;
    ot.tolerance = 1e-10;
    CHECK(check_thm3_laplacian_identity(ws, 1.0, grid, ot).pass);
}

TEST_CASE("sigma extraction recovers n - f on the weighted sphere") {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    WeightedSpace ws{m, make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, 0.45}}})};
    ScalarField u = scalar_from_expr("sin(theta)*cos(phi)", m.vars);
    QuadratureGrid grid = build_grid(m, 10);
    auto [sigma, rep] = extract_sigma(ws, u, grid);
    CHECK(rep.pass);
    int sampled = 0;
    for (const auto& p : grid.points) {
        if (!sigma.mask(p)) continue;
        CHECK(sigma.value(p) == doctest::Approx(2.0 - ws.density.value(p)).epsilon(1e-7));
        ++sampled;
    }
    CHECK(sampled > 0);
}

TEST_CASE("weighted sphere identity suite") {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    WeightedSpace ws{m, make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, 0.45}}})};
    ScalarField u = scalar_from_expr("sin(theta)*cos(phi)", m.vars);
    QuadratureGrid grid = build_grid(m, 10);
    CheckOptions o5;
    o5.tolerance = 1e-5;
    CHECK(check_weighted_bianchi(ws, grid, o5).pass);
    CHECK(check_kernel_consequence(ws, u, grid).pass);
    CHECK(check_traceless_static(ws, u, grid).pass);
    CHECK(check_traceless_divergence(ws, grid, o5).pass);
    CounterRng rng(3);
    CHECK(check_tensor_field_divergence(ws, random_tensor(m, rng, 100), u, grid, o5).pass);
}

TEST_CASE("expander trace separates hypothesis failure from identity failure") {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    QuadratureGrid grid = build_grid(m, 10);
    // tiny |v|: hypothesis holds to ~|v|^2, identity passes at 1e-6
    WeightedSpace small{m, make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, 5e-4}}})};
    ResidualReport ok = check_expander_trace(small, 1.0, -1.0, 2.0 - 2.5e-7, -4.0, grid);
    CHECK(ok.pass);
    // |v| = 0.45: the f^2 term breaks the affine R_f hypothesis and the
    // diagnostics say so
    WeightedSpace big{m, make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, 0.45}}})};
    ResidualReport bad = check_expander_trace(big, 1.0, -1.0, 2.0 - 0.2025, -4.0, grid);
    CHECK(diag(bad, "scalar_hypothesis") > 1e-3);
}

TEST_CASE("convergence order on the finite-difference path") {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    ScalarField f;
    f.value = [](const ChartPoint& x) { return 0.45 * std::cos(x(0)); };
    WeightedSpace ws{m, f};
    QuadratureGrid grid = build_grid(m, 10);
    CheckOptions o;
    o.tolerance = 1e-4;
    o.convergence_order = true;
    ResidualReport rep = check_weighted_bianchi(ws, grid, o);
    CHECK(rep.pass);
    REQUIRE(rep.convergence_order.has_value());
    CHECK(*rep.convergence_order >= 1.5);
}

TEST_CASE("sigma extraction fails loudly when the density is critical everywhere") {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    WeightedSpace ws{m, make_density(m, json{{"name", "zero"}})};
    ScalarField u = scalar_from_expr("cos(theta)", m.vars);
    QuadratureGrid grid = build_grid(m, 8);
    CHECK_THROWS_AS(extract_sigma(ws, u, grid), NumericError);
}

TEST_CASE("identity id catalog is stable") {
    const auto& ids = identity_ids();
    CHECK(ids.size() == 12);
    CHECK(is_identity_id("weighted-bianchi"));
    CHECK(is_identity_id("thm3-laplacian"));
    CHECK_FALSE(is_identity_id("bianchi"));
}
