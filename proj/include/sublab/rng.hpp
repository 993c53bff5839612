// Counter-based splittable RNG (Philox4x64-10) plus the variate generators
// used by the samplers. Streams are keyed by (seed, stream); draws depend
// only on the key and the counter, so chain k can own stream (seed, k) and
// produce the same values at any thread count.
//
// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sublab {

class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream) : key0_(seed), key1_(stream) {}

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return cached_gauss_;
        }
        // Box-Muller; u1 bounded away from 0
        double u1 = 0.0;
        do { u1 = uniform(); } while (u1 <= 0x1.0p-60);
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925287 * u2;
        cached_gauss_ = rad * std::sin(ang);
        have_gauss_ = true;
        return rad * std::cos(ang);
    }

    // Marsaglia-Tsang; shape > 0
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = std::max(uniform(), 0x1.0p-60);
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = gaussian();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = std::max(uniform(), 0x1.0p-60);
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

    double student_t(double dof) {
        return gaussian() / std::sqrt(chi_square(dof) / dof);
    }

private:
    static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
        const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(prod >> 64);
        lo = static_cast<std::uint64_t>(prod);
    }

    void refill() {
        // Philox4x64-10 round constants (Random123)
        constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ull;
        constexpr std::uint64_t M1 = 0xCA5A826395121157ull;
        constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ull;
        constexpr std::uint64_t W1 = 0xBB67AE8584CAA73Bull;

        std::uint64_t c0 = ctr0_, c1 = ctr1_, c2 = 0, c3 = 0;
        std::uint64_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) { k0 += W0; k1 += W1; }
            std::uint64_t hi0, lo0, hi1, lo1;
            mulhilo(M0, c0, hi0, lo0);
            mulhilo(M1, c2, hi1, lo1);
            const std::uint64_t n0 = hi1 ^ c1 ^ k0;
            const std::uint64_t n1 = lo1;
            const std::uint64_t n2 = hi0 ^ c3 ^ k1;
            const std::uint64_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        }
        buf_ = {c0, c1, c2, c3};
        pos_ = 0;
        if (++ctr0_ == 0) ++ctr1_;
    }

    std::uint64_t key0_, key1_;
    std::uint64_t ctr0_ = 0, ctr1_ = 0;
    std::array<std::uint64_t, 4> buf_{};
    int pos_ = 4;
    bool have_gauss_ = false;
    double cached_gauss_ = 0.0;
};

} // namespace sublab
