#pragma once

#include <cmath>
#include <cstdint>

namespace qrc {

// Splittable 64-bit generator (splitmix64 family): a Weyl sequence hashed
// through the Stafford mix13 finalizer. Substreams get their own odd gamma,
// derived from (seed, stream), so distinct workers walk distinct orbits and
// results do not depend on how work was divided.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
        gamma_ = mix_gamma(mix(state_ + 0xBF58476D1CE4E5B9ULL));
    }

    std::uint64_t next() {
        state_ += gamma_;
        return mix(state_);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Bernoulli(p) draw.
    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via the Marsaglia polar method (exact up to double
    // rounding; no dependence on any CDF approximation).
    double normal_polar() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Force gamma odd and reasonably mixed (same trick as SplittableRandom).
    static std::uint64_t mix_gamma(std::uint64_t z) {
        z |= 1ULL;
        const int bits = __builtin_popcountll(z ^ (z >> 1));
        if (bits < 24) z ^= 0xAAAAAAAAAAAAAAAAULL;
        return z;
    }

    std::uint64_t state_;
    std::uint64_t gamma_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qrc
