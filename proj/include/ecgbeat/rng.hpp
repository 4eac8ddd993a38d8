#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ecgbeat {

// Portable random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the std:: distributions are not,
// so all derived draws are defined here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [0, 1] (both endpoints reachable).
    double uniform_closed() {
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740991.0);
    }

    /// Uniform integer in [0, n). Rejection sampling, so unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % n;
    }

    /// Standard normal via Box-Muller (one value per call, the sine branch is discarded).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ecgbeat
