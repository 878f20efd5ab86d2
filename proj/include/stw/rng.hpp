#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace stw {

// Counter-based generator: sample k of a seeded run is a pure function of
// (seed, k), so parallel sweeps produce identical streams in any order.
struct Rng {
    uint64_t seed;
    explicit Rng(uint64_t s) : seed(s) {}

    static uint64_t splitmix(uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    uint64_t bits(uint64_t k, uint64_t salt = 0) const {
        return splitmix(splitmix(seed ^ (salt * 0xD1B54A32D192ED03ull)) + k);
    }

    // uniform in [0,1)
    double uniform(uint64_t k, uint64_t salt = 0) const {
        return static_cast<double>(bits(k, salt) >> 11) * 0x1.0p-53;
    }

    double uniform(uint64_t k, double lo, double hi, uint64_t salt = 0) const {
        return lo + (hi - lo) * uniform(k, salt);
    }

    double normal(uint64_t k, uint64_t salt = 0) const {
        double u1 = uniform(k, salt * 2 + 1);
        double u2 = uniform(k, salt * 2 + 2);
        u1 = std::max(u1, 1e-17);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::complex<double> disk(uint64_t k, double rmax, uint64_t salt = 0) const {
        double r = rmax * std::sqrt(uniform(k, salt * 2 + 11));
        double th = 2.0 * M_PI * uniform(k, salt * 2 + 12);
        return std::polar(r, th);
    }
};

}  // namespace stw
