#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wgeom/identities.hpp"
#include "wgeom/scenario.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

std::string scenario_dir() {
    const char* d = std::getenv("WGEOM_SCENARIO_DIR");
    REQUIRE(d != nullptr);
    return d;
}

json minimal_doc() {
    return json{{"scenario", "t"},
                {"model", {{"name", "sphere-spherical"}}},
                {"density", {{"name", "zero"}}},
                {"checks", {"weighted-bianchi"}}};
}

}  // namespace

TEST_CASE("minimal configuration takes documented defaults") {
    Scenario sc = parse_scenario(minimal_doc());
    CHECK(sc.grid_nodes == 24);
    CHECK(sc.boundary_nodes == 64);
    CHECK(sc.default_tolerance == 1e-6);
    CHECK(sc.seed == 0);
    CHECK_FALSE(sc.solver.has_value());
    REQUIRE(sc.checks.size() == 1);
    CHECK(sc.checks[0].tolerance == 1e-6);
}

TEST_CASE("unknown check id lists the valid ids") {
    json doc = minimal_doc();
    doc["checks"] = {"bianchi"};
    try {
        parse_scenario(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("unknown check id 'bianchi'") != std::string::npos);
        CHECK(msg.find("weighted-bianchi") != std::string::npos);
    }
}

TEST_CASE("unknown top-level and solver keys are errors") {
    json doc = minimal_doc();
    doc["gridnodes"] = 10;
    CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
    json doc2 = minimal_doc();
    doc2["solver"] = {{"basis", "fourier-circle"}, {"size", 4}, {"modes", 3}};
    CHECK_THROWS_AS(parse_scenario(doc2), ConfigError);
    json doc3 = minimal_doc();
    doc3["solver"] = {{"basis", "fourier-circle"}};  // missing positive size
    CHECK_THROWS_AS(parse_scenario(doc3), ConfigError);
}

TEST_CASE("checks are reported in catalog order regardless of input order") {
    json doc = minimal_doc();
    doc["checks"] = {"traceless-divergence", "weighted-bianchi"};
    Scenario sc = parse_scenario(doc);
    CHECK(sc.checks[0].id == "weighted-bianchi");
    CHECK(sc.checks[1].id == "traceless-divergence");
}

TEST_CASE("gaussian cookbook scenario passes end to end") {
    Scenario sc = parse_scenario_file(scenario_dir() + "/gaussian-example.json");
    RunReport rep = run(sc);
    CHECK(rep.pass);
    for (const auto& c : rep.checks) CHECK(c.pass);
    CHECK(rep.solver.present);
    CHECK(rep.solver.kernel_dim == 2);
    CHECK(rep.wall_ms == 0);
}

TEST_CASE("emitters cover the report") {
    Scenario sc = parse_scenario_file(scenario_dir() + "/interval-probe.json");
    RunReport rep = run(sc);
    std::string js = emit(rep, "json");
    json parsed = json::parse(js);
    CHECK(parsed["schema_version"] == 1);
    CHECK(parsed["solver"].contains("min_singular_value"));
    std::string csv = emit(rep, "csv");
    const auto rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == static_cast<long>(rep.checks.size()) + 1);  // header + one per check
    std::string txt = emit(rep, "text");
    CHECK(txt.find("PASS") != std::string::npos);
    CHECK_THROWS_AS(emit(rep, "yaml"), ConfigError);
}

TEST_CASE("json emission is byte-identical across runs") {
    Scenario sc = parse_scenario_file(scenario_dir() + "/weighted-sphere-example.json");
    std::string a = emit(run(sc), "json");
    std::string b = emit(run(sc), "json");
    CHECK(a == b);
}

TEST_CASE("every identity id and every model appears in the cookbook") {
    std::set<std::string> seen_checks, seen_models;
    for (const auto& entry : std::filesystem::directory_iterator(scenario_dir())) {
        if (entry.path().extension() != ".json") continue;
        Scenario sc = parse_scenario_file(entry.path().string());
        seen_models.insert(sc.model.at("name").get<std::string>());
        for (const auto& c : sc.checks) seen_checks.insert(c.id);
    }
    for (const auto& id : identity_ids()) {
        INFO("identity id ", id);
        CHECK(seen_checks.count(id) == 1);
    }
    for (const auto& m : model_names()) {
        INFO("model ", m);
        CHECK(seen_models.count(m) == 1);
    }
}

TEST_CASE("command line exit codes follow the contract") {
    const char* cli = std::getenv("WGEOM_CLI");
    REQUIRE(cli != nullptr);
    const std::string dir = scenario_dir();
    auto code = [&](const std::string& args) {
        const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(code("verify --scenario " + dir + "/sphere-einstein.json") == 0);
    CHECK(code("verify --scenario " + dir + "/sphere-einstein.json --tolerance 1e-14") == 1);
    CHECK(code("verify --scenario " + dir + "/no-such-file.json") == 2);
    CHECK(code("probe --scenario " + dir + "/circle-spectrum.json") == 2);  // no probe_floor
    CHECK(code("list") == 0);
}
