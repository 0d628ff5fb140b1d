#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace slicing {

// Stream tags. Every random quantity is drawn from its own substream so that
// adding a small cell never perturbs the draws of any other entity.
enum class StreamTag : std::uint64_t {
    SmallCellPlacement = 1,
    MacroUserPlacement = 2,
    SmallCellUserPlacement = 3,
    Fading = 4,
    ChannelSeed = 5,
};

// splitmix64 finaliser chained over the path components.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits; independent of the standard
    // library's distribution implementations.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Unit-mean exponential, strictly positive.
    double exponential();

private:
    std::mt19937_64 engine_;
};

}  // namespace slicing
