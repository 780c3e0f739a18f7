#pragma once
//
// Configuration-driven runner: scenario documents select a model, density,
// optional potential, a set of checks and an optional solver stage; runs
// produce a structured report emitted as json, csv or text.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgeom/report.hpp"
#include "wgeom/solver.hpp"

namespace wgeom {

struct CheckSpec {
    std::string id;
    double tolerance = 1e-6;
    bool order = false;             // measure convergence order across two steps
    nlohmann::json params;          // check-specific keys
};

struct SolverSpec {
    std::string basis;
    int size = 0;
    int grid_nodes = 0;             // 0: reuse the scenario grid node count
    int eigenpairs = 0;
    bool kernel = false;
    double kernel_tolerance = -1.0;        // singular-value cut; <0: default
    double accept_tolerance = 1e-6;        // pointwise adjoint residual
    std::optional<int> expect_kernel_dim;
    bool oracle = false;                   // compare spectrum to the dense FD oracle
    double oracle_tolerance = 1e-5;
    int oracle_nodes = 1024;               // oracle mesh (Richardson pairs it with 2N)
    std::optional<double> probe_floor;     // presence enables the probe ladder
    bool expect_kernel = false;            // probe is a positive control
};

struct Scenario {
    std::string name;
    nlohmann::json model;
    nlohmann::json density;
    nlohmann::json potential;       // optional scalar u, same registry as density
    std::vector<CheckSpec> checks;  // catalog order
    std::optional<SolverSpec> solver;
    int grid_nodes = 24;
    int boundary_nodes = 64;
    double default_tolerance = 1e-6;
    std::uint64_t seed = 0;
};

// All valid check ids: the identity catalog followed by the variation,
// duality and boundary checks.
const std::vector<std::string>& check_ids();

Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_file(const std::string& path);

struct SolverOutputs {
    bool present = false;
    std::vector<double> eigenvalues;
    int kernel_dim = 0;
    double min_singular_value = 0.0;
    double orthonormality_residual = 0.0;
    std::vector<ProbeLevel> probe_levels;
    std::string note;
    bool pass = true;
    std::vector<std::pair<std::string, double>> diagnostics;
};

struct RunReport {
    std::string scenario;
    std::vector<ResidualReport> checks;
    SolverOutputs solver;
    long long wall_ms = 0;          // stays 0 unless timing was requested
    bool pass = true;
};

// Executes all checks (a numeric failure fails that check, never aborts the
// run), then the solver stage when configured.
RunReport run(const Scenario& sc);

// format: json (full structured report), csv (one row per check), text
std::string emit(const RunReport& rep, const std::string& format);

}  // namespace wgeom
