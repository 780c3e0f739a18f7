#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wgeom/linearize.hpp"
#include "wgeom/metric.hpp"
#include "wgeom/random_fields.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

struct Setup {
    WeightedSpace ws;
    QuadratureGrid grid;
};

Setup sphere_setup(double vz) {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    ScalarField f = make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, vz}}});
    return {{m, f}, build_grid(m, 10)};
}

Setup box_setup() {
    MetricModel m = make_model(json{{"name", "diag-family"},
                                    {"entries", {"1 + 0.2*sin(x)*sin(y)", "1 + 0.1*cos(x)"}}});
    ScalarField f = make_density(m, json{{"name", "expr"}, {"expr", "0.3*sin(x) + 0.2*cos(y)"}});
    return {{m, f}, build_grid(m, 8)};
}

}  // namespace

TEST_CASE("closed variation formulas agree with the numeric t-derivative") {
    // 100 seeded (model, h, x) triples across two models
    int draws = 0;
    for (int s = 0; s < 2; ++s) {
        Setup su = s == 0 ? sphere_setup(0.45) : box_setup();
        CounterRng rng(101 + s);
        for (int d = 0; d < 50; ++d) {
            MetricPerturbation pert;
            pert.h = random_tensor(su.ws.model, rng, 2 * d * kFieldCounterStride);
            const auto pick = static_cast<std::size_t>(
                rng.uniform(1000 + d) * static_cast<double>(su.grid.size()));
            const ChartPoint& x = su.grid.points[std::min(pick, su.grid.size() - 1)];
            const double pairs[4][2] = {
                {variation_laplacian_f(su.ws, pert, x),
                 numeric_variation(su.ws, pert, VariedQuantity::LaplacianF, x)},
                {variation_gradnorm(su.ws, pert, x),
                 numeric_variation(su.ws, pert, VariedQuantity::GradNormF, x)},
                {variation_scalar(su.ws, pert, x),
                 numeric_variation(su.ws, pert, VariedQuantity::ScalarCurv, x)},
                {linearized_perelman(su.ws, pert, x),
                 numeric_variation(su.ws, pert, VariedQuantity::PerelmanScalar, x)}};
            for (const auto& pr : pairs)
                CHECK(std::abs(pr[0] - pr[1]) / (1.0 + std::abs(pr[1])) < 1e-5);
            ++draws;
        }
    }
    CHECK(draws == 100);
}

TEST_CASE("linearized Perelman map equals its expanded decomposition") {
    Setup su = sphere_setup(0.3);
    CounterRng rng(7);
    MetricPerturbation pert;
    pert.h = random_tensor(su.ws.model, rng, 0);
    for (std::size_t i = 0; i < su.grid.size(); i += 7) {
        const ChartPoint& x = su.grid.points[i];
        CHECK(linearized_perelman(su.ws, pert, x) ==
              doctest::Approx(linearized_perelman_expanded(su.ws, pert, x)).epsilon(1e-7));
    }
}

TEST_CASE("adjoint duality holds for seeded pairs on the closed sphere") {
    Setup su = sphere_setup(0.45);
    CounterRng rng(23);
    for (int d = 0; d < 20; ++d) {
        ScalarField u = random_scalar(su.ws.model, rng, 2 * d * kFieldCounterStride);
        MetricPerturbation pert;
        pert.h = random_tensor(su.ws.model, rng, (2 * d + 1) * kFieldCounterStride);
        TwoSidedReport rep = adjoint_duality_check(su.ws, u, pert, su.grid);
        CHECK(rep.relative_gap < 1e-6);
    }
}

TEST_CASE("perturbed model rejects a non-positive-definite step") {
    Setup su = box_setup();
    MetricPerturbation pert;
    pert.h = scalar_times_metric(su.ws.model, constant_field(-2.0));
    pert.t_step = 1.0;
    CHECK_THROWS_AS(require_spd_over_grid(su.ws, pert, su.grid), NumericError);
}
