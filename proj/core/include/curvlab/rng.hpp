#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "curvlab/field.hpp"

namespace curvlab {

// The single PRNG used everywhere. All distributions are derived from the raw
// mt19937_64 stream by hand (no std::*_distribution), so a given seed yields
// the same draws on every platform and every report names the algorithm.
class Prng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit Prng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Inclusive on both ends, rejection-sampled so the mapping is exact.
    std::uint64_t uniformInt(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t span = n + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = raw();
        } while (x >= limit);
        return x % span;
    }

    double normal() {
        if (haveSpare_) {
            haveSpare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(2.0 * std::numbers::pi * u2);
        haveSpare_ = true;
        return m * std::cos(2.0 * std::numbers::pi * u2);
    }

    Complex complexNormal() {
        const double re = normal();
        const double im = normal();
        return Complex(re, im) / std::sqrt(2.0);
    }

    Complex unitCircle() {
        const double t = 2.0 * std::numbers::pi * uniform();
        return Complex(std::cos(t), std::sin(t));
    }

    Vector gaussianVector(int n) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = complexNormal();
        return v;
    }

    // Uniform on the Euclidean unit sphere of C^n.
    Vector unitVector(int n) {
        Vector v = gaussianVector(n);
        double nrm = v.norm();
        while (nrm < 1e-12) {
            v = gaussianVector(n);
            nrm = v.norm();
        }
        return v / nrm;
    }

    // Point uniform in a rectangle.
    Complex pointIn(const Rect& r) {
        return Complex(uniform(r.center.real() - r.halfWidthRe, r.center.real() + r.halfWidthRe),
                       uniform(r.center.imag() - r.halfWidthIm, r.center.imag() + r.halfWidthIm));
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool haveSpare_ = false;
};

}  // namespace curvlab
