#pragma once

// Portable deterministic RNG. std::shuffle and the std distributions are
// implementation-defined, so every randomized step in the library draws
// from this generator to keep outputs bit-stable.

#include <cmath>
#include <cstdint>
#include <vector>

namespace dzp {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n) by rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t draw;
        do {
            draw = next();
        } while (draw >= limit);
        return draw % n;
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // First k entries of a Fisher-Yates pass; v keeps size, order past k is
    // unspecified but deterministic.
    template <typename T>
    void partial_shuffle(std::vector<T>& v, std::size_t k) {
        for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(v.size() - i));
            std::swap(v[i], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed for substream `index` of `seed`.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 r(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    return r.next();
}

}  // namespace dzp
