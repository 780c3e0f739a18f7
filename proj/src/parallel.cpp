#include "wgeom/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace wgeom {

namespace {
std::atomic<int> g_parallel{-1};  // -1 = unset, read WGEOM_SERIAL once

bool initial_state() {
    const char* env = std::getenv("WGEOM_SERIAL");
    if (env && std::strcmp(env, "0") != 0) return false;
    return true;
}
}  // namespace

bool parallel_enabled() {
    int s = g_parallel.load(std::memory_order_relaxed);
    if (s < 0) {
        s = initial_state() ? 1 : 0;
        g_parallel.store(s, std::memory_order_relaxed);
    }
    return s == 1;
}

void set_parallel(bool on) { g_parallel.store(on ? 1 : 0, std::memory_order_relaxed); }

}  // namespace wgeom
