#pragma once

#include <cstdint>
#include <random>

namespace epictrl {

/// Deterministic generator with portable draws.
///
/// Wraps std::mt19937_64, whose raw output sequence is fixed by the standard.
/// The standard distributions are implementation-defined, so uniform draws are
/// derived here from the raw bits to keep runs bit-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Requires n > 0.
    std::uint64_t below(std::uint64_t n);

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace epictrl
