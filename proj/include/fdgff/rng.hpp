#pragma once

#include <cstdint>

namespace fdgff {

// Splittable counter-based generator: per-stream state derived from
// (seed, stream index) so parallel consumers draw reproducible values.
struct SplitMix {
    uint64_t state;

    explicit SplitMix(uint64_t seed) : state(seed) {}
    SplitMix(uint64_t seed, uint64_t stream) : state(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t below(uint64_t n) { return next() % n; }

    double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

}  // namespace fdgff
