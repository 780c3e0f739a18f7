#pragma once
//
// Counter-based random stream: value(i) is a pure function of (seed, i), so
// draws are reproducible regardless of evaluation order or thread count.

#include <cstdint>

namespace wgeom {

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // splitmix64 finalizer over seed ^ counter
    double uniform(std::uint64_t counter) const {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (counter + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi)
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

    // Sequential convenience; advances an internal counter.
    double next() { return uniform(cursor_++); }
    double next(double lo, double hi) { return uniform(cursor_++, lo, hi); }

  private:
    std::uint64_t seed_;
    std::uint64_t cursor_ = 0;
};

}  // namespace wgeom
