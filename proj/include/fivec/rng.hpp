#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fivec {

// SplitMix64. The generator and every derived draw (uniform, normal,
// shuffle) are pinned here instead of <random> so that artifacts are
// byte-reproducible across standard library versions.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and a lane index.
inline uint64_t mix_seed(uint64_t base, uint64_t lane) {
    uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (lane + 0x632be59bd9b4e019ULL));
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; never zero, safe for log().
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n) by rejection.
    uint64_t next_below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Box-Muller, no cached spare so the draw count per call is fixed.
    double next_normal() {
        const double u1 = next_double_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

} // namespace fivec
