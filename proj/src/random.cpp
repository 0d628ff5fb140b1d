#include "slicing/random.hpp"

#include <cmath>

namespace slicing {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

double Stream::exponential() {
    // 1 - u lies in (0, 1], so the draw is finite; u == 0 maps to 0 which is
    // excluded by resampling to keep the support strictly positive.
    for (;;) {
        const double u = uniform();
        const double x = -std::log1p(-u);
        if (x > 0.0) return x;
    }
}

}  // namespace slicing
