#pragma once

#include <cmath>
#include <cstdint>

namespace post {

// SplitMix64 finalizer: a bijective 64-bit mix.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-based generator: output i of a stream is
//   splitmix64(key + (i+1) * 0x9e3779b97f4a7c15)
// with key = splitmix64(splitmix64(seed + GAMMA) ^ splitmix64(stream + C1)).
// Streams derived from (seed, stream-index) are independent, so Monte Carlo
// trials can be split across threads in any order and reproduce exactly.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(splitmix64(splitmix64(seed + 0x9e3779b97f4a7c15ull) ^
                          splitmix64(stream + 0xbf58476d1ce4e5b9ull))) {}

    std::uint64_t next_u64() {
        ++counter_;
        return splitmix64(key_ + counter_ * 0x9e3779b97f4a7c15ull);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via the Marsaglia polar method (pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace post
