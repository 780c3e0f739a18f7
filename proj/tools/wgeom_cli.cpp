#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wgeom/metric.hpp"
#include "wgeom/scenario.hpp"

namespace {

struct CommonArgs {
    std::string scenario_path;
    int resolution = 0;
    double tolerance = 0.0;
    std::string format = "text";
    std::int64_t seed = -1;
    std::string out_path;
    bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "scenario file (json)")->required();
    cmd->add_option("--resolution", args.resolution, "override grid nodes per axis");
    cmd->add_option("--tolerance", args.tolerance, "override the default check tolerance");
    cmd->add_option("--format", args.format, "output format: json, csv, text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("--seed", args.seed, "override the scenario seed");
    cmd->add_option("--out", args.out_path, "write the report to this path instead of stdout");
    cmd->add_flag("--timing", args.timing, "record wall time in the report (non-reproducible)");
}

wgeom::Scenario load(const CommonArgs& args) {
    wgeom::Scenario sc = wgeom::parse_scenario_file(args.scenario_path);
    if (args.resolution > 0) sc.grid_nodes = args.resolution;
    if (args.tolerance > 0.0) {
        sc.default_tolerance = args.tolerance;
        for (auto& cs : sc.checks) cs.tolerance = args.tolerance;
    }
    if (args.seed >= 0) sc.seed = static_cast<std::uint64_t>(args.seed);
    return sc;
}

int execute(const CommonArgs& args, const wgeom::Scenario& sc) {
    const auto t0 = std::chrono::steady_clock::now();
    wgeom::RunReport rep = wgeom::run(sc);
    if (args.timing)
        rep.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    const std::string text = wgeom::emit(rep, args.format);
    if (args.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(args.out_path, std::ios::binary);
        if (!out) throw wgeom::ConfigError("cannot write to '" + args.out_path + "'");
        out << text;
    }
    return rep.pass ? 0 : 1;
}

void print_list() {
    std::cout << "models:";
    for (const auto& n : wgeom::model_names()) std::cout << " " << n;
    std::cout << "\ndensities:";
    for (const auto& n : wgeom::density_names()) std::cout << " " << n;
    std::cout << "\nchecks:";
    for (const auto& n : wgeom::check_ids()) std::cout << " " << n;
    std::cout << "\nbases:";
    for (const auto& n : wgeom::basis_kinds()) std::cout << " " << n;
    std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification of weighted-geometry identities and kernel searches"};
    app.require_subcommand(1);

    CommonArgs verify_args, solve_args, probe_args;
    CLI::App* verify = app.add_subcommand("verify", "run the scenario's identity checks");
    add_common(verify, verify_args);
    CLI::App* solve = app.add_subcommand("solve", "run the scenario's spectral/kernel solver");
    add_common(solve, solve_args);
    CLI::App* probe = app.add_subcommand("probe", "run the scenario's nonexistence probe ladder");
    add_common(probe, probe_args);
    app.add_subcommand("list", "print the model, density, check and basis registries");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list")) {
            print_list();
            return 0;
        }
        if (app.got_subcommand("verify")) {
            return execute(verify_args, load(verify_args));
        }
        if (app.got_subcommand("solve")) {
            wgeom::Scenario sc = load(solve_args);
            if (!sc.solver) throw wgeom::ConfigError("scenario has no solver spec");
            sc.checks.clear();
            return execute(solve_args, sc);
        }
        if (app.got_subcommand("probe")) {
            wgeom::Scenario sc = load(probe_args);
            if (!sc.solver || !sc.solver->probe_floor)
                throw wgeom::ConfigError("scenario has no probe configuration (solver.probe_floor)");
            sc.checks.clear();
            return execute(probe_args, sc);
        }
    } catch (const wgeom::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const wgeom::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const wgeom::DomainError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
