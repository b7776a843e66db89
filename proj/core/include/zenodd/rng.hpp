#pragma once

#include <cstdint>
#include <random>

namespace zenodd {

/// Reproducible random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard, so draws are bit-identical on every conforming platform. The
/// standard distributions are implementation-defined and are not used:
/// uniform doubles take the top 53 bits of a draw, normals come from
/// Box-Muller on those uniforms.
///
/// Stream semantics: Rng(seed) seeds the engine with SplitMix64(seed).
/// Rng::stream(master, ordinal) derives an independent substream by mixing
/// the ordinal into the master seed with a second SplitMix64 round, so
/// trajectory `ordinal` always sees the same draws no matter which thread or
/// in which order it is evaluated.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static Rng stream(std::uint64_t master_seed, std::uint64_t ordinal);
    /// Seed that Rng::stream(master_seed, ordinal) passes to the constructor.
    static std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t ordinal);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random mantissa bits.
    double uniform01();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal.
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace zenodd
