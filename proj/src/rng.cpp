#include "pslife/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace pslife {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix64(seed ^ mix64(a ^ mix64(b)));
}

double runif01(SplitMix64& rng) {
    return (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1p-53;
}

std::int64_t rpoisson(SplitMix64& rng, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("rpoisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;

    if (mean < 10.0) {
        // Exponential spacings (product-of-uniforms form).
        const double limit = std::exp(-mean);
        std::int64_t k = 0;
        double p = runif01(rng);
        while (p > limit) {
            ++k;
            p *= runif01(rng);
        }
        return k;
    }

    // PTRS transformed rejection (Hormann 1993): constant expected number of
    // uniforms per draw for any large mean.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);

    while (true) {
        const double u = runif01(rng) - 0.5;
        const double v = runif01(rng);
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::int64_t>(kf);
        }
        if (kf < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double log_accept = std::log(v * inv_alpha / (a / (us * us) + b));
        if (log_accept <= kf * log_mean - mean - std::lgamma(kf + 1.0)) {
            return static_cast<std::int64_t>(kf);
        }
    }
}

}  // namespace pslife
