#pragma once

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "mmv/complex_matrix.hpp"

namespace mmv {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic random stream.  All samplers are written against the raw
// 64-bit generator output so that sequences are identical across platforms
// and standard-library implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    // Independent stream for one Monte Carlo trial.  Trials draw from
    // disjoint streams, so results do not depend on scheduling order.
    static RandomStream for_trial(std::uint64_t master_seed, std::uint64_t trial) {
        std::uint64_t state = master_seed;
        std::uint64_t a = detail::splitmix64(state);
        state = a ^ (trial * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
        std::uint64_t b = detail::splitmix64(state);
        return RandomStream(b);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * pi * u2);
    }

    // Circular complex Gaussian CN(0, variance): real and imaginary parts are
    // independent N(0, variance / 2).  One Box-Muller pair per draw.
    Complex complex_normal(double variance) {
        if (!(variance >= 0.0)) throw std::invalid_argument("complex_normal: negative variance");
        if (variance == 0.0) return Complex(0.0, 0.0);
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-variance * std::log1p(-u1));
        const double phi = 2.0 * pi * u2;
        return Complex(r * std::cos(phi), r * std::sin(phi));
    }

    // Inverse Gaussian IG(mean, shape) by the transformation method of
    // Michael, Schucany and Haas: one normal and one uniform per draw.
    double inverse_gaussian(double mean, double shape) {
        if (!(mean > 0.0) || !(shape > 0.0))
            throw std::invalid_argument("inverse_gaussian: mean and shape must be positive");
        const double z = normal();
        const double y = mean * z * z;
        double x = mean + (mean / (2.0 * shape)) * (y - std::sqrt(y * (y + 4.0 * shape)));
        if (x <= 0.0) x = DBL_MIN;  // guard against cancellation for tiny samples
        const double u = uniform();
        if (u <= mean / (mean + x)) return x;
        return mean * mean / x;
    }

private:
    static constexpr double pi = 3.141592653589793238462643383279502884;

    std::mt19937_64 gen_;
};

}  // namespace mmv
