// Seeded random streams with deterministic substream derivation.
//
// Replications draw from independent streams derived by hashing
// (master seed, replication index, stream tag), so results do not depend on
// scheduling and re-running a configuration reproduces every byte.
#pragma once

#include <cmath>
#include <cstdint>

namespace perthull {

namespace detail {
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace detail

// xoshiro256++ seeded through splitmix64.
class RngStream {
public:
    explicit RngStream(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = detail::splitmix64(sm);
    }

    // Independent stream for one replication of one purpose ("tag").
    static RngStream derive(uint64_t master, uint64_t index, uint64_t tag) {
        uint64_t sm = master;
        uint64_t a = detail::splitmix64(sm);
        sm = a ^ (index * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull);
        uint64_t b = detail::splitmix64(sm);
        sm = b ^ (tag * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
        return RngStream(detail::splitmix64(sm));
    }

    uint64_t next_u64() {
        const uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; for logs and inverse CDFs.
    double next_double_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method.
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double x, y, s;
        do {
            x = 2.0 * next_double() - 1.0;
            y = 2.0 * next_double() - 1.0;
            s = x * x + y * y;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = y * f;
        has_cached_ = true;
        return x * f;
    }

    // Poisson count: sequential inversion below mean 30, transformed-rejection
    // (PTRD, Hoermann 1993) above.  Alternates need only match in distribution.
    long long next_poisson(double mean) {
        if (mean <= 0.0) return 0;
        return mean < 30.0 ? poisson_inversion(mean) : poisson_ptrd(mean);
    }

private:
    long long poisson_inversion(double mean) {
        const double expm = std::exp(-mean);
        long long k = 0;
        double prod = next_double_pos();
        while (prod > expm) {
            prod *= next_double_pos();
            ++k;
        }
        return k;
    }

    long long poisson_ptrd(double mean) {
        const double smu = std::sqrt(mean);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = next_double() - 0.5;
            double v = next_double_pos();
            double us = 0.5 - std::fabs(u);
            double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<long long>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * std::log(mean) - mean - std::lgamma(k + 1.0)) {
                return static_cast<long long>(k);
            }
        }
    }

    uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace perthull
