#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ndnfwd {

// Deterministic random stream. The engine is std::mt19937_64 (fully specified
// by the standard); the value mappings are hand-rolled so the same seed yields
// the same sequence on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

    // Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Exponential inter-arrival gap with the given mean.
    double exponential(double mean) {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return -mean * std::log(u);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Derives an independent child stream, stable in (seed, salt).
    static Rng fork(std::uint64_t seed, std::uint64_t salt) {
        // splitmix64 on the combined key decorrelates nearby seeds.
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ndnfwd
