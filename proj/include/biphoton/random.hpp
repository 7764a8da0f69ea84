#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace biphoton {

// Default master seed used by the CLI and bound into the background
// calibration preset.
inline constexpr std::uint64_t kDefaultMasterSeed = 123456789ULL;

// SplitMix64 finalizer (Steele/Lea/Flood). Full-avalanche 64-bit mix.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Per-realization seed: realization j gets the same stream no matter which
// worker runs it, so parallel and serial ensembles are bit-identical.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

// Canonical SplitMix64 generator: golden-ratio counter + finalizer. All
// stochastic synthesis in this project draws from it, so a (seed, draw count)
// pair reproduces the same stream on any platform and standard library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t state_;
};

// 53-bit uniform in [0, 1)
inline double uniform53(SplitMix64& eng) {
    return static_cast<double>(eng.next() >> 11) * 0x1.0p-53;
}

// Standard-normal stream via Box-Muller on explicit 53-bit uniforms.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform53(eng_);
        while (u1 == 0.0) u1 = uniform53(eng_);
        const double u2 = uniform53(eng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    SplitMix64 eng_;
    double spare_{0.0};
    bool have_spare_{false};
};

// Poisson sample by accumulating exponential waiting times in log space.
// Exact distribution for any mean; no exp(-mean) underflow at large rates.
inline long long poisson_sample(double mean, SplitMix64& eng) {
    if (!(mean > 0.0)) return 0;
    long long k = 0;
    double acc = 0.0;
    for (;;) {
        double u = uniform53(eng);
        while (u == 0.0) u = uniform53(eng);
        acc += -std::log(u);
        if (acc >= mean) return k;
        ++k;
    }
}

}  // namespace biphoton
