#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace curirl {

/// Seeded pseudo-random source used everywhere randomness appears.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// Doubles are built from the top 53 bits of one draw, and indices use
/// rejection sampling, so every stream is bitwise reproducible across
/// standard libraries (std::uniform_*_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform in {0, ..., n-1}; n must be positive.
    std::size_t index(std::size_t n);

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent sub-seeds from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

} // namespace curirl
