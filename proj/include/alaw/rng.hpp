#pragma once

#include <cmath>
#include <cstdint>

namespace alaw {

// Deterministic RNG with a fixed cross-platform bit stream.  std::mt19937_64
// would be reproducible too, but the std distributions on top of it are
// implementation-defined; we need byte-identical state files and CSV output
// for identical seeds, so the uniform->normal mapping is spelled out here.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1) with 53 bits of mantissa
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; caches the second deviate
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace alaw
