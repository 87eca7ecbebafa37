#pragma once

#include <cstdint>
#include <random>

namespace qlab {

/// Seeded pseudo-random source shared by every stochastic operation.
///
/// Wraps std::mt19937_64 but does its own conversion to doubles and bounded
/// integers so that streams are reproducible across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    /// Independent stream for a sub-task (a role, a run id, an attempt).
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed) ^ mix(stream + 0x9e3779b97f4a7c15ULL));
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform integer in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace qlab
