#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wgeom/parallel.hpp"
#include "wgeom/scenario.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

json sphere_doc() {
    return json{{"scenario", "par"},
                {"model", {{"name", "sphere-spherical"}}},
                {"density", {{"name", "linear"}, {"vector", {0.0, 0.0, 0.3}}}},
                {"potential", {{"name", "linear"}, {"vector", {1.0, 0.0, 0.0}}}},
                {"checks",
                 {"weighted-bianchi", "kernel-consequence", "traceless-static",
                  "adjoint-duality", "variation-oracle"}},
                {"tolerances", {{"default", 1e-5}}},
                {"solver",
                 {{"basis", "sphere-harmonic-chart"},
                  {"size", 4},
                  {"grid_nodes", 16},
                  {"kernel", true}}},
                {"grid", {{"nodes", 12}}},
                {"seed", 5}};
}

struct ParallelGuard {
    bool saved = parallel_enabled();
    ~ParallelGuard() { set_parallel(saved); }
};

}  // namespace

TEST_CASE("serial and OpenMP paths emit byte-identical reports") {
    ParallelGuard guard;
    Scenario sc = parse_scenario(sphere_doc());
    set_parallel(false);
    std::string serial = emit(run(sc), "json");
    set_parallel(true);
    std::string parallel = emit(run(sc), "json");
    CHECK(serial == parallel);
}

TEST_CASE("parallel_sum is a fixed-order reduction") {
    ParallelGuard guard;
    auto term = [](std::ptrdiff_t i) {
        const double x = 1e-3 * static_cast<double>(i + 1);
        return std::sin(x) / (1.0 + x * x);
    };
    set_parallel(false);
    const double a = parallel_sum(100000, term);
    set_parallel(true);
    const double b = parallel_sum(100000, term);
    CHECK(a == b);
}

TEST_CASE("execution switch round-trips") {
    ParallelGuard guard;
    set_parallel(true);
    CHECK(parallel_enabled());
    set_parallel(false);
    CHECK_FALSE(parallel_enabled());
}
