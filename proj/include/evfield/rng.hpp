#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evfield {

// Deterministic random source. std::mt19937_64 has a standard-mandated
// sequence, but the std:: distributions do not, so the distribution code
// lives here. Same seed => same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps the
    // draw unbiased.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return lo + static_cast<int>(v % span);
    }

    // Uniform double in [0, 1) with 53 bits of entropy.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; both draws consumed every call.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace evfield
