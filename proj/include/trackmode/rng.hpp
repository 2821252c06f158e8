#ifndef TRACKMODE_RNG_HPP
#define TRACKMODE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace trackmode {

/// Seeded random source with portable derived draws.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// library distributions are not, so every draw we need (unit doubles,
/// bounded ints, normals, shuffles) is implemented here on top of the
/// raw engine. Identical seeds give identical streams on any platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Standard normal via Box-Muller; generates pairs, caches the second.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_unit(); // (0, 1]
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.141592653589793238462643 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

    /// Unbiased integer in [0, n) by rejection.
    uint64_t bounded(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Independent stream derived from this seed and a stream index.
    Rng fork(uint64_t stream) const { return Rng(mix(seed_, stream)); }

    /// SplitMix64-style mixer for combining seeds with stream/epoch indices.
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    uint64_t seed_;
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace trackmode

#endif // TRACKMODE_RNG_HPP
