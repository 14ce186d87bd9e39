#pragma once

#include <cstdint>

namespace pslife {

// splitmix64: tiny, fast, and fully specified, so synthetic data is
// bit-identical across platforms and standard libraries (std distributions
// make no such promise).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Deterministic stream partitioning: hashes (seed, a, b) into an independent
// engine seed so per-block generation is order- and concurrency-insensitive.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// Uniform draw strictly inside (0, 1).
double runif01(SplitMix64& rng);

// Poisson draw: exponential-spacings counting below mean 10, transformed
// rejection (PTRS) above — O(1) per draw even for means in the millions.
std::int64_t rpoisson(SplitMix64& rng, double mean);

}  // namespace pslife
