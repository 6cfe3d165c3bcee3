#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace paddle {

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for the `index`-th item of a stream rooted at `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Reproducible random source. The engine is mt19937_64, whose output
/// sequence is fixed by the C++ standard; the transforms below are
/// implemented here instead of through <random> distributions, whose
/// algorithms are implementation-defined. Same seed, same stream, on every
/// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound) by rejection sampling; bound > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal by the Marsaglia polar method.
    double normal();

    /// `count` distinct indices drawn uniformly from [0, n), in draw order
    /// (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace paddle
