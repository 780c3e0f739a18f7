// Serial-reference vs OpenMP comparison for the grid kernels. The parallel
// switch routes every grid loop, so timing the same workload under both
// settings measures the full parallel path.

#include <benchmark/benchmark.h>

#include "wgeom/identities.hpp"
#include "wgeom/metric.hpp"
#include "wgeom/parallel.hpp"
#include "wgeom/solver.hpp"

using namespace wgeom;
using nlohmann::json;

namespace {

WeightedSpace weighted_sphere() {
    MetricModel m = make_model(json{{"name", "sphere-spherical"}});
    ScalarField f = make_density(m, json{{"name", "linear"}, {"vector", {0.0, 0.0, 0.45}}});
    return {m, f};
}

void bench_bianchi(benchmark::State& state, bool parallel) {
    WeightedSpace ws = weighted_sphere();
    QuadratureGrid grid = build_grid(ws.model, static_cast<int>(state.range(0)));
    set_parallel(parallel);
    for (auto _ : state) {
        ResidualReport rep = check_weighted_bianchi(ws, grid);
        benchmark::DoNotOptimize(rep.sup_residual);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(grid.size()));
    set_parallel(true);
}

void bench_adjoint_assembly(benchmark::State& state, bool parallel) {
    WeightedSpace ws = weighted_sphere();
    DiscreteBasis basis = make_basis(ws.model, "sphere-harmonic-chart", 6);
    QuadratureGrid grid = build_grid(ws.model, static_cast<int>(state.range(0)));
    set_parallel(parallel);
    for (auto _ : state) {
        Mat A = assemble_adjoint_matrix(ws, basis, grid);
        benchmark::DoNotOptimize(A(0, 0));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(grid.size()));
    set_parallel(true);
}

void bianchi_serial(benchmark::State& s) { bench_bianchi(s, false); }
void bianchi_openmp(benchmark::State& s) { bench_bianchi(s, true); }
void adjoint_serial(benchmark::State& s) { bench_adjoint_assembly(s, false); }
void adjoint_openmp(benchmark::State& s) { bench_adjoint_assembly(s, true); }

BENCHMARK(bianchi_serial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bianchi_openmp)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(adjoint_serial)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(adjoint_openmp)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
