#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace irrmap {

/// Deterministic random source. mt19937_64 output is pinned by the
/// standard; the uniform and Gaussian transforms are implemented here
/// rather than via std::*_distribution so that streams are identical
/// across standard library implementations.
class rng {
public:
    explicit rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Standard complex Gaussian (independent real and imaginary parts).
    std::complex<double> cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

private:
    std::mt19937_64 gen_;
};

} // namespace irrmap
