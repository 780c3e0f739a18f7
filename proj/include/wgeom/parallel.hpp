#pragma once
//
// OpenMP execution switch. All grid kernels route through parallel_for so a
// single flag selects the serial reference path or the OpenMP path. Results
// must be identical either way: kernels write per-index slots and reductions
// are performed afterwards in fixed index order.

#include <cstddef>
#include <numeric>
#include <vector>

namespace wgeom {

bool parallel_enabled();
void set_parallel(bool on);

template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
    if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    }
}

// Fixed-order sum of per-point contributions; deterministic across thread counts.
template <class F>
double parallel_sum(std::ptrdiff_t n, F&& term) {
    std::vector<double> slot(static_cast<std::size_t>(n));
    parallel_for(n, [&](std::ptrdiff_t i) { slot[static_cast<std::size_t>(i)] = term(i); });
    double acc = 0.0;
    for (double v : slot) acc += v;
    return acc;
}

}  // namespace wgeom
