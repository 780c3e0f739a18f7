#include "wgeom/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wgeom/boundary.hpp"
#include "wgeom/identities.hpp"
#include "wgeom/linearize.hpp"
#include "wgeom/random_fields.hpp"

namespace wgeom {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::string> kExtraChecks = {
    "variation-oracle", "adjoint-duality",  "surface-gravity",    "boundary-area",
    "pohozaev-schoen",  "gauss-reduction",  "thm1-area-estimate"};

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

double get_num(const json& obj, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj.at(key).is_number()) throw ConfigError("'" + key + "' must be numeric");
    return obj.at(key).get<double>();
}

double require_num(const json& obj, const std::string& key, const std::string& check) {
    if (!obj.contains(key))
        throw ConfigError("check '" + check + "' requires parameter '" + key + "'");
    if (!obj.at(key).is_number()) throw ConfigError("'" + key + "' must be numeric");
    return obj.at(key).get<double>();
}

int get_int(const json& obj, const std::string& key, int dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj.at(key).is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    return obj.at(key).get<int>();
}

int catalog_rank(const std::string& id) {
    const auto& ids = check_ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    return -1;
}

std::string valid_ids_message() {
    std::string msg;
    for (const auto& id : check_ids()) msg += (msg.empty() ? "" : ", ") + id;
    return msg;
}

CheckSpec parse_check(const json& entry, double default_tol) {
    CheckSpec cs;
    cs.tolerance = default_tol;
    if (entry.is_string()) {
        cs.id = entry.get<std::string>();
    } else if (entry.is_object()) {
        if (!entry.contains("id")) throw ConfigError("check entry missing 'id'");
        cs.id = entry.at("id").get<std::string>();
        cs.tolerance = get_num(entry, "tolerance", default_tol);
        if (entry.contains("order")) cs.order = entry.at("order").get<bool>();
        cs.params = json::object();
        for (auto it = entry.begin(); it != entry.end(); ++it)
            if (it.key() != "id" && it.key() != "tolerance" && it.key() != "order")
                cs.params[it.key()] = it.value();
    } else {
        throw ConfigError("check entries must be id strings or objects");
    }
    if (catalog_rank(cs.id) < 0)
        throw ConfigError("unknown check id '" + cs.id + "'; valid ids: " + valid_ids_message());
    if (cs.params.is_null()) cs.params = json::object();
    return cs;
}

SolverSpec parse_solver(const json& obj) {
    check_keys(obj,
               {"basis", "size", "grid_nodes", "eigenpairs", "kernel", "kernel_tolerance",
                "accept_tolerance", "expect_kernel_dim", "oracle", "oracle_tolerance",
                "oracle_nodes", "probe_floor", "expect_kernel"},
               "solver spec");
    SolverSpec s;
    if (!obj.contains("basis")) throw ConfigError("solver spec requires 'basis'");
    s.basis = obj.at("basis").get<std::string>();
    const auto kinds = basis_kinds();
    if (std::find(kinds.begin(), kinds.end(), s.basis) == kinds.end()) {
        std::string msg;
        for (const auto& k : kinds) msg += (msg.empty() ? "" : ", ") + k;
        throw ConfigError("unknown basis kind '" + s.basis + "'; valid kinds: " + msg);
    }
    s.size = get_int(obj, "size", 0);
    s.grid_nodes = get_int(obj, "grid_nodes", 0);
    s.eigenpairs = get_int(obj, "eigenpairs", 0);
    if (obj.contains("kernel")) s.kernel = obj.at("kernel").get<bool>();
    s.kernel_tolerance = get_num(obj, "kernel_tolerance", -1.0);
    s.accept_tolerance = get_num(obj, "accept_tolerance", 1e-6);
    if (obj.contains("expect_kernel_dim")) s.expect_kernel_dim = get_int(obj, "expect_kernel_dim", 0);
    if (obj.contains("oracle")) s.oracle = obj.at("oracle").get<bool>();
    s.oracle_tolerance = get_num(obj, "oracle_tolerance", 1e-5);
    s.oracle_nodes = get_int(obj, "oracle_nodes", 1024);
    if (obj.contains("probe_floor")) s.probe_floor = get_num(obj, "probe_floor", 0.0);
    if (obj.contains("expect_kernel")) s.expect_kernel = obj.at("expect_kernel").get<bool>();
    if (s.size <= 0 && !s.probe_floor)
        throw ConfigError("solver spec requires a positive 'size'");
    return s;
}

ResidualReport failed_report(const std::string& id, double tol, const std::string& what) {
    ResidualReport rep;
    rep.identity_id = id;
    rep.tolerance = tol;
    rep.sup_residual = 9e99;
    rep.mean_residual = 9e99;
    rep.pass = false;
    rep.diagnostics.emplace_back("numeric_failure", 1.0);
    (void)what;
    return rep;
}

ResidualReport from_two_sided(const TwoSidedReport& ts) {
    ResidualReport rep;
    rep.identity_id = ts.id;
    rep.sup_residual = ts.relative_gap;
    rep.mean_residual = ts.relative_gap;
    rep.tolerance = ts.tolerance;
    rep.pass = ts.pass;
    rep.diagnostics.emplace_back("lhs", ts.lhs);
    rep.diagnostics.emplace_back("rhs", ts.rhs);
    for (const auto& d : ts.diagnostics) rep.diagnostics.push_back(d);
    return rep;
}

struct RunContext {
    const Scenario& sc;
    WeightedSpace ws;
    QuadratureGrid grid;
    BoundaryGrid bgrid;
    std::optional<ScalarField> potential;
    CounterRng rng;
};

ScalarField potential_or_random(RunContext& ctx, std::uint64_t base) {
    if (ctx.potential) return *ctx.potential;
    return random_scalar(ctx.ws.model, ctx.rng, base);
}

SymTensorField tensor_param(RunContext& ctx, const json& params, std::uint64_t base) {
    const std::string kind =
        params.contains("tensor") ? params.at("tensor").get<std::string>() : "random";
    if (kind == "random") return random_tensor(ctx.ws.model, ctx.rng, base);
    if (kind == "metric") return scalar_times_metric(ctx.ws.model, constant_field(1.0));
    if (kind == "bakry-emery") {
        SymTensorField T;
        T.dim = ctx.ws.model.dim;
        WeightedSpace ws = ctx.ws;
        T.value = [ws](const ChartPoint& x) { return bakry_emery_ricci(ws, x); };
        return T;  // derivatives by the FD fallback
    }
    throw ConfigError("unknown tensor parameter '" + kind +
                      "'; valid: random, metric, bakry-emery");
}

ResidualReport run_variation_oracle(RunContext& ctx, const CheckSpec& cs, std::uint64_t base) {
    const int draws = get_int(cs.params, "draws", 20);
    check_keys(cs.params, {"draws"}, "variation-oracle parameters");
    ResidualReport rep;
    rep.identity_id = cs.id;
    rep.tolerance = cs.tolerance;
    rep.grid_size = draws;
    double sup = 0.0, mean = 0.0;
    int count = 0;
    for (int d = 0; d < draws; ++d) {
        MetricPerturbation pert;
        pert.h = random_tensor(ctx.ws.model, ctx.rng, base + 2 * d * kFieldCounterStride);
        const auto pick = static_cast<std::size_t>(
            ctx.rng.uniform(base + (2 * d + 1) * kFieldCounterStride) *
            static_cast<double>(ctx.grid.size()));
        const ChartPoint& x = ctx.grid.points[std::min(pick, ctx.grid.size() - 1)];
        const double closed[4] = {variation_laplacian_f(ctx.ws, pert, x),
                                  variation_gradnorm(ctx.ws, pert, x),
                                  variation_scalar(ctx.ws, pert, x),
                                  linearized_perelman(ctx.ws, pert, x)};
        const VariedQuantity q[4] = {VariedQuantity::LaplacianF, VariedQuantity::GradNormF,
                                     VariedQuantity::ScalarCurv, VariedQuantity::PerelmanScalar};
        for (int j = 0; j < 4; ++j) {
            const double numeric = numeric_variation(ctx.ws, pert, q[j], x);
            const double gap = std::abs(closed[j] - numeric) / (1.0 + std::abs(numeric));
            sup = std::max(sup, gap);
            mean += gap;
            ++count;
        }
    }
    rep.sup_residual = sup;
    rep.mean_residual = count > 0 ? mean / count : 0.0;
    rep.finalize();
    return rep;
}

ResidualReport run_adjoint_duality(RunContext& ctx, const CheckSpec& cs, std::uint64_t base) {
    const int draws = get_int(cs.params, "draws", 5);
    check_keys(cs.params, {"draws"}, "adjoint-duality parameters");
    ResidualReport rep;
    rep.identity_id = cs.id;
    rep.tolerance = cs.tolerance;
    rep.grid_size = draws;
    double sup = 0.0, mean = 0.0;
    for (int d = 0; d < draws; ++d) {
        ScalarField u = random_scalar(ctx.ws.model, ctx.rng, base + 2 * d * kFieldCounterStride);
        MetricPerturbation pert;
        pert.h = random_tensor(ctx.ws.model, ctx.rng, base + (2 * d + 1) * kFieldCounterStride);
        TwoSidedReport ts = adjoint_duality_check(ctx.ws, u, pert, ctx.grid, cs.tolerance);
        sup = std::max(sup, ts.relative_gap);
        mean += ts.relative_gap;
    }
    rep.sup_residual = sup;
    rep.mean_residual = draws > 0 ? mean / draws : 0.0;
    rep.finalize();
    return rep;
}

ResidualReport run_surface_gravity(RunContext& ctx, const CheckSpec& cs) {
    check_keys(cs.params, {"expect_kappa"}, "surface-gravity parameters");
    if (!ctx.potential) throw ConfigError("surface-gravity requires a scenario potential");
    auto sg = surface_gravity(ctx.ws, *ctx.potential, ctx.bgrid);
    ResidualReport rep;
    rep.identity_id = cs.id;
    rep.tolerance = cs.tolerance;
    rep.grid_size = static_cast<int>(sg.size());
    double sup = 0.0;
    for (const auto& c : sg) {
        double dev = c.variation;
        if (cs.params.contains("expect_kappa"))
            dev = std::max(dev, std::abs(c.kappa - cs.params.at("expect_kappa").get<double>()));
        sup = std::max(sup, dev);
        rep.diagnostics.emplace_back("kappa_" + c.component, c.kappa);
        rep.diagnostics.emplace_back("variation_" + c.component, c.variation);
    }
    rep.sup_residual = sup;
    rep.mean_residual = sup;
    rep.finalize();
    return rep;
}

ResidualReport run_pohozaev(RunContext& ctx, const CheckSpec& cs, std::uint64_t base) {
    check_keys(cs.params, {"tensor", "vector", "draws"}, "pohozaev-schoen parameters");
    const int draws = get_int(cs.params, "draws", 1);
    const std::string vec_kind =
        cs.params.contains("vector") ? cs.params.at("vector").get<std::string>() : "random";
    ResidualReport rep;
    rep.identity_id = cs.id;
    rep.tolerance = cs.tolerance;
    rep.grid_size = draws;
    double sup = 0.0, mean = 0.0;
    for (int d = 0; d < draws; ++d) {
        SymTensorField T = tensor_param(ctx, cs.params, base + 2 * d * kFieldCounterStride);
        VectorField X;
        if (vec_kind == "gradient-potential") {
            if (!ctx.potential)
                throw ConfigError("pohozaev-schoen vector 'gradient-potential' needs a potential");
            X = gradient_field(ctx.ws.model, *ctx.potential);
        } else if (vec_kind == "random") {
            X = gradient_field(ctx.ws.model,
                               random_scalar(ctx.ws.model, ctx.rng,
                                             base + (2 * d + 1) * kFieldCounterStride));
        } else {
            throw ConfigError("unknown vector parameter '" + vec_kind +
                              "'; valid: random, gradient-potential");
        }
        TwoSidedReport ts = pohozaev_schoen(ctx.ws, T, X, ctx.grid, ctx.bgrid, cs.tolerance);
        sup = std::max(sup, ts.relative_gap);
        mean += ts.relative_gap;
        if (d == 0) {
            rep.diagnostics.emplace_back("lhs", ts.lhs);
            rep.diagnostics.emplace_back("rhs", ts.rhs);
        }
    }
    rep.sup_residual = sup;
    rep.mean_residual = draws > 0 ? mean / draws : 0.0;
    rep.finalize();
    return rep;
}

ResidualReport dispatch_check(RunContext& ctx, const CheckSpec& cs, std::uint64_t base) {
    CheckOptions opts;
    opts.tolerance = cs.tolerance;
    opts.convergence_order = cs.order;
    const std::string& id = cs.id;
    if (id == "weighted-bianchi") {
        check_keys(cs.params, {}, "weighted-bianchi parameters");
        return check_weighted_bianchi(ctx.ws, ctx.grid, opts);
    }
    if (id == "divf-gtrace") {
        check_keys(cs.params, {}, "divf-gtrace parameters");
        return check_divf_gtrace(ctx.ws, potential_or_random(ctx, base), ctx.grid, opts);
    }
    if (id == "divf-hessian") {
        check_keys(cs.params, {}, "divf-hessian parameters");
        return check_divf_hessian(ctx.ws, potential_or_random(ctx, base), ctx.grid, opts);
    }
    if (id == "kernel-consequence") {
        check_keys(cs.params, {}, "kernel-consequence parameters");
        return check_kernel_consequence(ctx.ws, potential_or_random(ctx, base), ctx.grid, opts);
    }
    if (id == "sigma-extraction") {
        check_keys(cs.params, {}, "sigma-extraction parameters");
        return extract_sigma(ctx.ws, potential_or_random(ctx, base), ctx.grid, opts).second;
    }
    if (id == "log-identity") {
        check_keys(cs.params, {}, "log-identity parameters");
        ScalarField u = potential_or_random(ctx, base);
        auto [sigma, sig_rep] = extract_sigma(ctx.ws, u, ctx.grid, opts);
        ResidualReport rep = check_log_identity(ctx.ws, u, sigma, ctx.grid, opts);
        rep.diagnostics.emplace_back("sigma_residual", sig_rep.sup_residual);
        return rep;
    }
    if (id == "expander-trace") {
        check_keys(cs.params, {"lambda0", "lambda1", "c0", "c1"}, "expander-trace parameters");
        return check_expander_trace(ctx.ws, require_num(cs.params, "lambda0", id),
                                    require_num(cs.params, "lambda1", id),
                                    require_num(cs.params, "c0", id),
                                    require_num(cs.params, "c1", id), ctx.grid, opts);
    }
    if (id == "traceless-static") {
        check_keys(cs.params, {}, "traceless-static parameters");
        return check_traceless_static(ctx.ws, potential_or_random(ctx, base), ctx.grid, opts);
    }
    if (id == "traceless-divergence") {
        check_keys(cs.params, {}, "traceless-divergence parameters");
        return check_traceless_divergence(ctx.ws, ctx.grid, opts);
    }
    if (id == "weighted-bochner") {
        check_keys(cs.params, {}, "weighted-bochner parameters");
        return check_weighted_bochner(ctx.ws, potential_or_random(ctx, base), ctx.grid, opts);
    }
    if (id == "tensor-divergence") {
        check_keys(cs.params, {"tensor", "specialized"}, "tensor-divergence parameters");
        if (cs.params.contains("specialized"))
            opts.specialized_form = cs.params.at("specialized").get<bool>();
        SymTensorField T = tensor_param(ctx, cs.params, base);
        return check_tensor_field_divergence(ctx.ws, T, potential_or_random(ctx, base + 32),
                                             ctx.grid, opts);
    }
    if (id == "thm3-laplacian") {
        check_keys(cs.params, {"omega"}, "thm3-laplacian parameters");
        return check_thm3_laplacian_identity(ctx.ws, require_num(cs.params, "omega", id),
                                             ctx.grid, opts);
    }
    if (id == "variation-oracle") return run_variation_oracle(ctx, cs, base);
    if (id == "adjoint-duality") return run_adjoint_duality(ctx, cs, base);
    if (id == "surface-gravity") return run_surface_gravity(ctx, cs);
    if (id == "boundary-area") {
        check_keys(cs.params, {}, "boundary-area parameters");
        if (!ctx.potential) throw ConfigError("boundary-area requires a scenario potential");
        return from_two_sided(
            boundary_area_identity(ctx.ws, *ctx.potential, ctx.grid, ctx.bgrid, cs.tolerance));
    }
    if (id == "pohozaev-schoen") return run_pohozaev(ctx, cs, base);
    if (id == "gauss-reduction") {
        check_keys(cs.params, {}, "gauss-reduction parameters");
        return gauss_reduction_check(ctx.ws, ctx.bgrid, opts);
    }
    if (id == "thm1-area-estimate") {
        check_keys(cs.params, {"c0", "c1"}, "thm1-area-estimate parameters");
        if (!ctx.potential) throw ConfigError("thm1-area-estimate requires a scenario potential");
        InequalityReport ineq =
            thm1_estimate(ctx.ws, *ctx.potential, require_num(cs.params, "c0", id),
                          require_num(cs.params, "c1", id), ctx.grid, ctx.bgrid);
        ResidualReport rep;
        rep.identity_id = ineq.id;
        rep.sup_residual = ineq.lhs - ineq.rhs;  // negative when the estimate holds
        rep.mean_residual = rep.sup_residual;
        rep.tolerance = 0.0;
        rep.pass = ineq.strict;
        rep.diagnostics.emplace_back("lhs", ineq.lhs);
        rep.diagnostics.emplace_back("rhs", ineq.rhs);
        rep.diagnostics.emplace_back("slack", ineq.slack);
        for (const auto& d : ineq.diagnostics) rep.diagnostics.push_back(d);
        return rep;
    }
    throw ConfigError("unknown check id '" + id + "'");
}

SolverOutputs run_solver(RunContext& ctx, const SolverSpec& s) {
    SolverOutputs out;
    out.present = true;
    const int gn = s.grid_nodes > 0 ? s.grid_nodes : ctx.sc.grid_nodes;
    if (s.probe_floor) {
        ProbeReport pr = nonexistence_probe(ctx.ws, s.basis, *s.probe_floor, s.accept_tolerance);
        out.probe_levels = pr.levels;
        out.note = pr.note;
        out.min_singular_value = pr.levels.empty() ? 0.0 : pr.levels.front().min_singular_value;
        for (const auto& lv : pr.levels)
            out.min_singular_value = std::min(out.min_singular_value, lv.min_singular_value);
        out.kernel_dim = pr.levels.empty() ? 0 : pr.levels.back().kernel_dim;
        out.diagnostics = pr.diagnostics;
        out.pass = s.expect_kernel ? pr.kernel_found : pr.bounded_below;
        return out;
    }
    DiscreteBasis basis = make_basis(ctx.ws.model, s.basis, s.size);
    QuadratureGrid grid = s.basis == "grid-fd" ? QuadratureGrid{} : build_grid(ctx.ws.model, gn);
    if (s.eigenpairs > 0) {
        SpectralResult sr = solve_drift_eigen(ctx.ws, basis, grid, s.eigenpairs);
        out.eigenvalues = sr.eigenvalues;
        out.orthonormality_residual = sr.orthonormality_residual;
        if (sr.orthonormality_residual > 1e-8) out.pass = false;
        if (s.oracle) {
            const int k = std::min<int>(5, static_cast<int>(sr.eigenvalues.size()));
            auto oracle = dense_fd_spectrum_richardson(ctx.ws, s.oracle_nodes, k);
            double worst = 0.0;
            for (int i = 0; i < k; ++i)
                worst = std::max(worst, std::abs(sr.eigenvalues[static_cast<std::size_t>(i)] -
                                                 oracle[static_cast<std::size_t>(i)]));
            out.diagnostics.emplace_back("oracle_gap", worst);
            if (worst > s.oracle_tolerance) out.pass = false;
        }
    }
    if (s.kernel) {
        KernelSearchResult ks =
            kernel_search(ctx.ws, basis, grid, s.kernel_tolerance, s.accept_tolerance);
        out.min_singular_value = ks.min_singular_value;
        double worst = 0.0;
        for (const auto& c : ks.candidates) {
            if (c.accepted) ++out.kernel_dim;
            worst = std::max(worst, c.sup_residual);
        }
        out.diagnostics.emplace_back("max_candidate_residual", worst);
        for (const auto& c : ks.candidates)
            if (!c.accepted) out.pass = false;
        if (s.expect_kernel_dim && out.kernel_dim != *s.expect_kernel_dim) out.pass = false;
    }
    return out;
}

std::string shortest(double v) { return json(v).dump(); }

}  // namespace

const std::vector<std::string>& check_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v = identity_ids();
        v.insert(v.end(), kExtraChecks.begin(), kExtraChecks.end());
        return v;
    }();
    return ids;
}

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ConfigError("scenario document must be a json object");
    check_keys(doc,
               {"scenario", "model", "density", "potential", "checks", "solver", "grid",
                "tolerances", "seed"},
               "scenario document");
    Scenario sc;
    if (doc.contains("scenario")) sc.name = doc.at("scenario").get<std::string>();
    if (!doc.contains("model")) throw ConfigError("scenario requires a 'model' spec");
    sc.model = doc.at("model");
    if (sc.model.is_string()) sc.model = json{{"name", sc.model.get<std::string>()}};
    sc.density = doc.contains("density") ? doc.at("density") : json{{"name", "zero"}};
    if (doc.contains("potential")) sc.potential = doc.at("potential");
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_integer()) throw ConfigError("'seed' must be an integer");
        sc.seed = doc.at("seed").get<std::uint64_t>();
    }
    json tol_overrides = json::object();
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (it.key() == "default") {
                sc.default_tolerance = it.value().get<double>();
            } else if (catalog_rank(it.key()) >= 0) {
                tol_overrides[it.key()] = it.value();
            } else {
                throw ConfigError("unknown key '" + it.key() +
                                  "' in tolerances; use 'default' or a check id");
            }
        }
    }
    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        check_keys(g, {"nodes", "boundary_nodes"}, "grid spec");
        sc.grid_nodes = get_int(g, "nodes", sc.grid_nodes);
        sc.boundary_nodes = get_int(g, "boundary_nodes", sc.boundary_nodes);
    }
    if (doc.contains("checks")) {
        if (!doc.at("checks").is_array()) throw ConfigError("'checks' must be an array");
        for (const auto& entry : doc.at("checks")) {
            CheckSpec cs = parse_check(entry, sc.default_tolerance);
            if (tol_overrides.contains(cs.id) && (!entry.is_object() ||
                                                  !entry.contains("tolerance")))
                cs.tolerance = tol_overrides.at(cs.id).get<double>();
            sc.checks.push_back(std::move(cs));
        }
    }
    std::stable_sort(sc.checks.begin(), sc.checks.end(), [](const CheckSpec& a, const CheckSpec& b) {
        return catalog_rank(a.id) < catalog_rank(b.id);
    });
    if (doc.contains("solver")) sc.solver = parse_solver(doc.at("solver"));
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("malformed scenario file '" + path + "': " + e.what());
    }
    return parse_scenario(doc);
}

RunReport run(const Scenario& sc) {
    RunReport rep;
    rep.scenario = sc.name;
    MetricModel m = make_model(sc.model);
    ScalarField f = make_density(m, sc.density);
    RunContext ctx{sc,
                   WeightedSpace{m, f},
                   build_grid(m, sc.grid_nodes),
                   build_boundary_grid(m, sc.boundary_nodes),
                   std::nullopt,
                   CounterRng(sc.seed)};
    if (!sc.potential.is_null() && !sc.potential.empty())
        ctx.potential = make_density(m, sc.potential);
    std::uint64_t base = 1000;
    for (const auto& cs : sc.checks) {
        try {
            rep.checks.push_back(dispatch_check(ctx, cs, base));
        } catch (const NumericError& e) {
            rep.checks.push_back(failed_report(cs.id, cs.tolerance, e.what()));
        } catch (const DomainError& e) {
            rep.checks.push_back(failed_report(cs.id, cs.tolerance, e.what()));
        }
        base += 256 * kFieldCounterStride;
    }
    if (sc.solver) {
        try {
            rep.solver = run_solver(ctx, *sc.solver);
        } catch (const NumericError&) {
            rep.solver.present = true;
            rep.solver.pass = false;
            rep.solver.note = "numeric failure in solver stage";
        }
    }
    rep.pass = rep.solver.pass || !rep.solver.present;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

std::string emit(const RunReport& rep, const std::string& format) {
    if (format == "json") {
        ordered_json doc;
        doc["schema_version"] = 1;
        doc["scenario"] = rep.scenario;
        doc["checks"] = ordered_json::array();
        for (const auto& c : rep.checks) {
            ordered_json jc;
            jc["identity_id"] = c.identity_id;
            jc["sup_residual"] = c.sup_residual;
            jc["mean_residual"] = c.mean_residual;
            jc["convergence_order"] =
                c.convergence_order ? ordered_json(*c.convergence_order) : ordered_json(nullptr);
            jc["masked_fraction"] = c.masked_fraction;
            jc["tolerance"] = c.tolerance;
            jc["pass"] = c.pass;
            ordered_json diag = ordered_json::object();
            for (const auto& [k, v] : c.diagnostics) diag[k] = v;
            jc["diagnostics"] = diag;
            doc["checks"].push_back(jc);
        }
        if (rep.solver.present) {
            ordered_json js;
            js["eigenvalues"] = rep.solver.eigenvalues;
            js["kernel_dim"] = rep.solver.kernel_dim;
            js["min_singular_value"] = rep.solver.min_singular_value;
            js["orthonormality_residual"] = rep.solver.orthonormality_residual;
            if (!rep.solver.probe_levels.empty()) {
                js["probe"] = ordered_json::array();
                for (const auto& lv : rep.solver.probe_levels)
                    js["probe"].push_back({{"resolution", lv.resolution},
                                           {"min_singular_value", lv.min_singular_value},
                                           {"kernel_dim", lv.kernel_dim}});
            }
            if (!rep.solver.note.empty()) js["note"] = rep.solver.note;
            ordered_json diag = ordered_json::object();
            for (const auto& [k, v] : rep.solver.diagnostics) diag[k] = v;
            js["diagnostics"] = diag;
            js["pass"] = rep.solver.pass;
            doc["solver"] = js;
        } else {
            doc["solver"] = nullptr;
        }
        doc["wall_ms"] = rep.wall_ms;
        doc["pass"] = rep.pass;
        return doc.dump(2) + "\n";
    }
    if (format == "csv") {
        std::ostringstream out;
        out << "identity_id,sup_residual,mean_residual,pass\n";
        for (const auto& c : rep.checks)
            out << c.identity_id << ',' << shortest(c.sup_residual) << ','
                << shortest(c.mean_residual) << ',' << (c.pass ? "true" : "false") << '\n';
        return out.str();
    }
    if (format == "text") {
        std::ostringstream out;
        out << "scenario: " << rep.scenario << "\n";
        for (const auto& c : rep.checks) {
            out << (c.pass ? "[PASS] " : "[FAIL] ") << c.identity_id
                << "  sup=" << shortest(c.sup_residual) << "  tol=" << shortest(c.tolerance);
            if (c.convergence_order) out << "  order=" << shortest(*c.convergence_order);
            if (c.masked_fraction > 0.0) out << "  masked=" << shortest(c.masked_fraction);
            out << "\n";
        }
        if (rep.solver.present) {
            out << (rep.solver.pass ? "[PASS] " : "[FAIL] ") << "solver";
            if (!rep.solver.eigenvalues.empty()) {
                out << "  sigma=[";
                for (std::size_t i = 0; i < rep.solver.eigenvalues.size(); ++i)
                    out << (i ? ", " : "") << shortest(rep.solver.eigenvalues[i]);
                out << "]";
            }
            if (rep.solver.kernel_dim > 0 || !rep.solver.probe_levels.empty())
                out << "  kernel_dim=" << rep.solver.kernel_dim;
            out << "  min_sv=" << shortest(rep.solver.min_singular_value);
            if (!rep.solver.note.empty()) out << "  (" << rep.solver.note << ")";
            out << "\n";
        }
        out << (rep.pass ? "PASS" : "FAIL") << "\n";
        return out.str();
    }
    throw ConfigError("unknown output format '" + format + "'; valid: json, csv, text");
}

}  // namespace wgeom
