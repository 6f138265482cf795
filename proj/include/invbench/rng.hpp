#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace invbench {

/// Seeded random stream used by every stochastic component.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions are written out here instead of using
/// <random>'s, because those are implementation-defined and would break
/// replay equality between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double cauchy(double loc, double scale) {
        return loc + scale * std::tan(std::numbers::pi * (uniform() - 0.5));
    }

    /// Exponential(1), i.e. Gamma(1, 1).
    double exponential() { return -std::log(1.0 - uniform()); }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return static_cast<std::size_t>(r % bound);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace invbench
