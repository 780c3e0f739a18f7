// Acceptance gate: ten end-to-end criteria with pinned tolerances, one
// pass/fail line each. Exits nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wgeom/boundary.hpp"
#include "wgeom/identities.hpp"
#include "wgeom/random_fields.hpp"
#include "wgeom/scenario.hpp"
#include "wgeom/solver.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("%-4s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++g_failures;
}

std::string scenario_dir() {
    const char* d = std::getenv("WGEOM_SCENARIO_DIR");
    if (!d) {
        std::fprintf(stderr, "WGEOM_SCENARIO_DIR is not set\n");
        std::exit(2);
    }
    return d;
}

WeightedSpace gaussian_space(int dim) {
    MetricModel m = make_model(json{{"name", "gaussian-chart"}, {"dim", dim}});
    return {m, make_density(m, json{{"name", "gaussian"}})};
}

WeightedSpace weighted_sphere(double vz) {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    return {m, make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, vz}}})};
}

// Coefficients of the coordinate functions in the given basis, columns
// G-normalized (the coordinates are mutually orthogonal under the even
// Gaussian weight on the symmetric cube).
Mat coordinate_span(const WeightedSpace& ws, const DiscreteBasis& b, const QuadratureGrid& g,
                    const Mat& G) {
    const int n = ws.model.dim;
    Mat B(b.size, n);
    for (int i = 0; i < n; ++i) {
        Vec rhs(b.size);
        for (int k = 0; k < b.size; ++k) {
            ScalarField phi = b.field(k);
            rhs[k] = weighted_volume_integral(
                ws.model, ws.density, g,
                [&](const ChartPoint& x) { return phi.value(x) * x(i); });
        }
        Vec c = G.ldlt().solve(rhs);
        B.col(i) = c / std::sqrt(c.dot(G * c));
    }
    return B;
}

void ac1() {
    bool pass = true;
    double worst_res = 0.0, worst_angle = 0.0;
    for (int n : {2, 3}) {
        WeightedSpace ws = gaussian_space(n);
        Vec v = Vec::Zero(n);
        v[0] = 0.6;
        v[n - 1] = -0.8;
        QuadratureGrid g = build_grid(ws.model, n == 2 ? 16 : 10);
        const double res = kernel_residual(ws, linear_ambient_field(ws.model, v), g);
        worst_res = std::max(worst_res, res);
        pass = pass && res < 1e-8;
        DiscreteBasis b = make_basis(ws.model, "poly-cube", 3);
        KernelSearchResult ks = kernel_search(ws, b, g, -1.0, 1e-8);
        pass = pass && static_cast<int>(ks.candidates.size()) == n;
        for (const auto& c : ks.candidates) pass = pass && c.accepted;
        Mat G = assemble_drift_laplacian(ws, b, g).G;
        Mat A(b.size, static_cast<int>(ks.candidates.size()));
        for (int j = 0; j < A.cols(); ++j)
            A.col(j) = ks.candidates[static_cast<std::size_t>(j)].coefficients;
        if (A.cols() == n) {
            const double ang = principal_angle_gap(A, coordinate_span(ws, b, g, G), G);
            worst_angle = std::max(worst_angle, ang);
            pass = pass && ang < 1e-6;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "gaussian kernel, n=2,3: residual %.2e (tol 1e-8), angle %.2e (tol 1e-6)",
                  worst_res, worst_angle);
    report("AC1", pass, buf);
}

void ac2() {
    const double vz = 0.3;
    WeightedSpace ws = weighted_sphere(vz);
    Vec w(3);
    w << 1.0, 0.0, 0.0;
    ScalarField u = linear_ambient_field(ws.model, w);
    QuadratureGrid g = build_grid(ws.model, 12);
    const double res = kernel_residual(ws, u, g);
    bool pass = res < 1e-6;
    auto [sigma, rep] = extract_sigma(ws, u, g);
    double sig_err = 0.0, ric_err = 0.0;
    for (const auto& p : g.points) {
        if (sigma.mask(p))
            sig_err = std::max(sig_err,
                               std::abs(sigma.value(p) - (2.0 - ws.density.value(p))));
        Mat gm = ws.model.metric_at(p);
        ric_err = std::max(ric_err, (bakry_emery_ricci(ws, p) -
                                     (1.0 - ws.density.value(p)) * gm)
                                        .cwiseAbs()
                                        .maxCoeff());
    }
    pass = pass && rep.pass && sig_err < 1e-6 && ric_err < 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "weighted sphere: residual %.2e, sigma err %.2e, Ric_f err %.2e (tol 1e-6)",
                  res, sig_err, ric_err);
    report("AC2", pass, buf);
}

void ac3() {
    double worst = 0.0;
    int draws = 0;
    for (int s = 0; s < 2; ++s) {
        WeightedSpace ws =
            s == 0 ? weighted_sphere(0.45)
                   : WeightedSpace{make_model(json{{"name", "diag-family"},
                                                   {"entries",
                                                    {"1 + 0.2*sin(x)*sin(y)",
                                                     "1 + 0.1*cos(x)"}}}),
                                   ScalarField{}};
        if (s == 1)
            ws.density = make_density(ws.model,
                                      json{{"name", "expr"}, {"expr", "0.3*sin(x) + 0.2*cos(y)"}});
        QuadratureGrid g = build_grid(ws.model, s == 0 ? 10 : 8);
        CounterRng rng(101 + s);
        for (int d = 0; d < 50; ++d) {
            MetricPerturbation pert;
            pert.h = random_tensor(ws.model, rng, 2 * d * kFieldCounterStride);
            const auto pick = static_cast<std::size_t>(rng.uniform(1000 + d) *
                                                       static_cast<double>(g.size()));
            const ChartPoint& x = g.points[std::min(pick, g.size() - 1)];
            const double pairs[4][2] = {
                {variation_laplacian_f(ws, pert, x),
                 numeric_variation(ws, pert, VariedQuantity::LaplacianF, x)},
                {variation_gradnorm(ws, pert, x),
                 numeric_variation(ws, pert, VariedQuantity::GradNormF, x)},
                {variation_scalar(ws, pert, x),
                 numeric_variation(ws, pert, VariedQuantity::ScalarCurv, x)},
                {linearized_perelman(ws, pert, x),
                 numeric_variation(ws, pert, VariedQuantity::PerelmanScalar, x)}};
            for (const auto& pr : pairs)
                worst = std::max(worst, std::abs(pr[0] - pr[1]) / (1.0 + std::abs(pr[1])));
            ++draws;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d variation triples: worst rel gap %.2e (tol 1e-5)", draws,
                  worst);
    report("AC3", draws == 100 && worst < 1e-5, buf);
}

void ac4() {
    WeightedSpace ws = weighted_sphere(0.45);
    QuadratureGrid g = build_grid(ws.model, 10);
    CounterRng rng(23);
    double worst = 0.0;
    for (int d = 0; d < 20; ++d) {
        ScalarField u = random_scalar(ws.model, rng, 2 * d * kFieldCounterStride);
        MetricPerturbation pert;
        pert.h = random_tensor(ws.model, rng, (2 * d + 1) * kFieldCounterStride);
        worst = std::max(worst, adjoint_duality_check(ws, u, pert, g).relative_gap);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "20 duality pairs on S^2: worst gap %.2e (tol 1e-6)", worst);
    report("AC4", worst < 1e-6, buf);
}

void ac5(const std::map<std::string, RunReport>& reports) {
    std::map<std::string, bool> id_pass;
    bool orders_ok = true;
    double worst_order = 99.0;
    for (const auto& [name, rep] : reports) {
        for (const auto& c : rep.checks) {
            if (!is_identity_id(c.identity_id)) continue;
            if (c.pass) id_pass[c.identity_id] = true;
            else if (id_pass.find(c.identity_id) == id_pass.end())
                id_pass[c.identity_id] = false;
            if (c.convergence_order) {
                worst_order = std::min(worst_order, *c.convergence_order);
                orders_ok = orders_ok && *c.convergence_order >= 1.5;
            }
        }
    }
    bool pass = orders_ok;
    std::string missing;
    for (const auto& id : identity_ids()) {
        auto it = id_pass.find(id);
        if (it == id_pass.end() || !it->second) {
            pass = false;
            missing += (missing.empty() ? "" : ",") + id;
        }
    }
    char buf[200];
    if (missing.empty())
        std::snprintf(buf, sizeof buf,
                      "all 12 identities pass in the cookbook; min FD order %.2f (>= 1.5)",
                      worst_order);
    else
        std::snprintf(buf, sizeof buf, "failing or missing identities: %s", missing.c_str());
    report("AC5", pass, buf);
}

void ac6() {
    MetricModel m = make_model(json{{"name", "hemisphere"}});
    WeightedSpace ws{m, make_density(m, json{{"name", "linear"}, {"vector", {0.45, 0.0, 0.0}}})};
    Vec height(3);
    height << 0.0, 0.0, 1.0;
    ScalarField u = linear_ambient_field(m, height);
    QuadratureGrid g = build_grid(m, 16);
    BoundaryGrid bg = build_boundary_grid(m, 64);
    TwoSidedReport area = boundary_area_identity(ws, u, g, bg);
    auto sg = surface_gravity(ws, u, bg);
    bool pass = area.relative_gap < 1e-6 && sg.size() == 1 &&
                std::abs(sg[0].kappa - 1.0) < 1e-8 && sg[0].variation < 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "hemisphere: area gap %.2e (tol 1e-6), kappa %.10f, variation %.2e (tol 1e-8)",
                  area.relative_gap, sg.empty() ? 0.0 : sg[0].kappa,
                  sg.empty() ? 1.0 : sg[0].variation);
    report("AC6", pass, buf);
}

void ac7() {
    MetricModel m = make_model(json{{"name", "hemisphere"}});
    WeightedSpace ws{m, make_density(m, json{{"name", "linear"}, {"vector", {0.45, 0.0, 0.0}}})};
    QuadratureGrid g = build_grid(m, 16);
    BoundaryGrid bg = build_boundary_grid(m, 64);
    SymTensorField gt = scalar_times_metric(m, constant_field(1.0));
    CounterRng rng(11);
    double worst_g = 0.0;
    for (int d = 0; d < 10; ++d) {
        VectorField X = gradient_field(m, random_scalar(m, rng, d * kFieldCounterStride));
        worst_g = std::max(worst_g, pohozaev_schoen(ws, gt, X, g, bg).relative_gap);
    }
    SymTensorField ric;
    ric.dim = 2;
    WeightedSpace wsc = ws;
    ric.value = [wsc](const ChartPoint& x) { return bakry_emery_ricci(wsc, x); };
    Vec height(3);
    height << 0.0, 0.0, 1.0;
    VectorField X = gradient_field(m, linear_ambient_field(m, height));
    const double ric_gap = pohozaev_schoen(ws, ric, X, g, bg).relative_gap;
    bool pass = worst_g < 1e-6 && ric_gap < 1e-5;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Pohozaev-Schoen: T=g worst gap %.2e (tol 1e-6), T=Ric_f gap %.2e (tol 1e-5)",
                  worst_g, ric_gap);
    report("AC7", pass, buf);
}

void ac8() {
    bool pass = true;
    MetricModel cm = make_model(json{{"name", "circle"}});
    WeightedSpace cs{cm, make_density(cm, json{{"name", "zero"}})};
    QuadratureGrid cg = build_grid(cm, 64);
    DiscreteBasis cb = make_basis(cm, "fourier-circle", 8);
    AssembledOperator cop = assemble_drift_laplacian(cs, cb, cg);
    pass = pass && cop.asymmetry < 1e-10;
    SpectralResult csr = solve_drift_eigen(cs, cb, cg, 11);
    double circle_err = 0.0;
    for (int k = 0; k <= 5; ++k) {
        const std::size_t lo = k == 0 ? 0 : static_cast<std::size_t>(2 * k - 1);
        circle_err = std::max(circle_err,
                              std::abs(csr.eigenvalues[lo] - static_cast<double>(k * k)));
    }
    pass = pass && circle_err < 1e-10;

    MetricModel im = make_model(json{{"name", "interval"}, {"a", -3.0}, {"b", 3.0}});
    WeightedSpace is{im, make_density(im, json{{"name", "expr"}, {"expr", "x^2/2"}})};
    auto oracle = dense_fd_spectrum_richardson(is, 1024, 5);
    DiscreteBasis ib = make_basis(im, "interval-dirichlet", 512);
    QuadratureGrid ig = build_grid(im, 1024);
    SpectralResult isr = solve_drift_eigen(is, ib, ig, 5);
    double interval_err = 0.0;
    for (int i = 0; i < 5; ++i)
        interval_err = std::max(interval_err, std::abs(isr.eigenvalues[static_cast<std::size_t>(i)] -
                                                       oracle[static_cast<std::size_t>(i)]));
    pass = pass && interval_err < 1e-6;

    // self-adjointness in the weighted measure: integral pairing gap on
    // closed models for seeded smooth fields
    double pairing = 0.0;
    {
        WeightedSpace sph = weighted_sphere(0.3);
        WeightedSpace circ{cm, make_density(cm, json{{"name", "expr"}, {"expr", "cos(theta)"}})};
        const WeightedSpace* spaces[2] = {&sph, &circ};
        for (int s = 0; s < 2; ++s) {
            const WeightedSpace& w = *spaces[s];
            QuadratureGrid g = build_grid(w.model, s == 0 ? 14 : 128);
            CounterRng rng(77 + s);
            for (int d = 0; d < 5; ++d) {
                ScalarField u = random_scalar(w.model, rng, 2 * d * kFieldCounterStride);
                ScalarField v = random_scalar(w.model, rng, (2 * d + 1) * kFieldCounterStride);
                const double lhs = weighted_volume_integral(
                    w.model, w.density, g,
                    [&](const ChartPoint& x) { return drift_laplacian(w, u, x) * v.value(x); });
                const double rhs = weighted_volume_integral(
                    w.model, w.density, g,
                    [&](const ChartPoint& x) { return u.value(x) * drift_laplacian(w, v, x); });
                pairing = std::max(pairing, std::abs(lhs - rhs));
            }
        }
    }
    pass = pass && pairing < 1e-10;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "spectra: circle err %.2e (tol 1e-10), interval vs oracle %.2e (tol 1e-6), "
                  "self-adjointness gap %.2e (tol 1e-10)",
                  circle_err, interval_err, pairing);
    report("AC8", pass, buf);
}

void ac9() {
    MetricModel im = make_model(json{{"name", "interval"}, {"a", -3.0}, {"b", 3.0}});
    WeightedSpace is{im, make_density(im, json{{"name", "expr"}, {"expr", "x"}})};
    ProbeReport pr = nonexistence_probe(is, "interval-dirichlet", 0.4);
    bool pass = pr.bounded_below && !pr.kernel_found && pr.levels.size() == 3;
    double min_sv = 1e300;
    for (const auto& lv : pr.levels) min_sv = std::min(min_sv, lv.min_singular_value);

    MetricModel hm = make_model(json{{"name", "hemisphere"}});
    WeightedSpace hs{hm, make_density(hm, json{{"name", "zero"}})};
    ProbeReport hp = nonexistence_probe(hs, "sphere-harmonic-chart", 0.05);
    pass = pass && hp.kernel_found;
    Vec height(3);
    height << 0.0, 0.0, 1.0;
    const double res =
        kernel_residual(hs, linear_ambient_field(hm, height), build_grid(hm, 12));
    pass = pass && res < 1e-6;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "probe: interval min sv %.4f (floor 0.4), hemisphere control kernel residual "
                  "%.2e (tol 1e-6)",
                  min_sv, res);
    report("AC9", pass, buf);
}

void ac10(const std::map<std::string, RunReport>& reports) {
    const std::string dir = scenario_dir();
    Scenario sc = parse_scenario_file(dir + "/weighted-sphere-example.json");
    const bool deterministic = emit(run(sc), "json") == emit(run(sc), "json");

    bool exit_ok = true;
    if (const char* cli = std::getenv("WGEOM_CLI")) {
        auto code = [&](const std::string& args) {
            const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
            return WEXITSTATUS(std::system(cmd.c_str()));
        };
        exit_ok = code("verify --scenario " + dir + "/sphere-einstein.json") == 0 &&
                  code("verify --scenario " + dir + "/sphere-einstein.json --tolerance 1e-14") ==
                      1 &&
                  code("verify --scenario " + dir + "/missing.json") == 2;
    }

    std::map<std::string, bool> check_seen;
    std::map<std::string, bool> model_seen;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        Scenario s = parse_scenario_file(entry.path().string());
        model_seen[s.model.at("name").get<std::string>()] = true;
        for (const auto& c : s.checks) check_seen[c.id] = true;
    }
    bool coverage = true;
    for (const auto& id : identity_ids()) coverage = coverage && check_seen[id];
    for (const auto& m : model_names()) coverage = coverage && model_seen[m];

    bool all_pass = true;
    for (const auto& [name, rep] : reports) all_pass = all_pass && rep.pass;

    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "determinism %s, exit codes %s, cookbook coverage %s, all scenarios %s",
                  deterministic ? "ok" : "BROKEN", exit_ok ? "ok" : "BROKEN",
                  coverage ? "ok" : "INCOMPLETE", all_pass ? "pass" : "FAILING");
    report("AC10", deterministic && exit_ok && coverage && all_pass, buf);
}

}  // namespace

int main() {
    std::map<std::string, RunReport> reports;
    for (const auto& entry : std::filesystem::directory_iterator(scenario_dir())) {
        if (entry.path().extension() != ".json") continue;
        Scenario sc = parse_scenario_file(entry.path().string());
        reports[sc.name] = run(sc);
    }

    ac1();
    ac2();
    ac3();
    ac4();
    ac5(reports);
    ac6();
    ac7();
    ac8();
    ac9();
    ac10(reports);

    if (g_failures) std::printf("%d of 10 criteria failed\n", g_failures);
    return g_failures ? 1 : 0;
}
