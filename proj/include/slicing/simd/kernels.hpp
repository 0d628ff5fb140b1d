#pragma once

// Data-parallel inner loops of the allocator. Each kernel has a scalar
// reference and optional vector variants; all variants produce bit-identical
// results (no FMA contraction, identical operation order, logarithms taken
// per lane with std::log2).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string_view>
#include <vector>

namespace slicing::simd {

inline constexpr double kLn2 = std::numbers::ln2;

// Per-subchannel inputs for one transmitter in one cell.
struct ChannelRow {
    const double* own_gain;                 // transmitter -> serving cell
    const double* macro_gain;               // transmitter -> macrocell
    const double* noise_plus_interference;  // at the serving cell, W
    const double* price;                    // interference price per subchannel
    std::size_t size;
};

// Reference formulas shared by every variant and by the scalar allocator API.
inline double clamp_power(double p, double p_max) {
    p = p > 0.0 ? p : 0.0;  // NaN -> 0, matching maxpd operand order
    return p < p_max ? p : p_max;
}

inline double waterfill_one(double weight, double lambda, double p_max, double price,
                            double macro_gain, double own_gain, double noise_plus_interference) {
    const double level = weight / (kLn2 * (lambda + price * macro_gain));
    return clamp_power(level - noise_plus_interference / own_gain, p_max);
}

inline double spectral_efficiency_one(double power, double own_gain, double noise_plus_interference) {
    return std::log2(1.0 + power * own_gain / noise_plus_interference);
}

inline double lagrangian_one(double weight, double lambda, double power, double price,
                             double macro_gain, double own_gain, double noise_plus_interference) {
    return weight * spectral_efficiency_one(power, own_gain, noise_plus_interference) -
           (lambda + price * macro_gain) * power;
}

struct KernelTable {
    std::string_view name;

    // power[i] = waterfill_one(...); weight must be > 0.
    void (*waterfill)(double weight, double lambda, double p_max, const ChannelRow& row, double* power);

    // value[i] = lagrangian_one(...)
    void (*lagrangian)(double weight, double lambda, const ChannelRow& row, const double* power,
                       double* value);

    // out[i] = log2(1 + power[i] * gain[i] / npi[i])
    void (*spectral_efficiency)(const double* power, const double* gain, const double* npi,
                                double* out, std::size_t n);

    // acc[i] += a[i] * b[i]
    void (*accumulate_product)(const double* a, const double* b, double* acc, std::size_t n);
};

const KernelTable& scalar_kernels();

// Every variant compiled in and supported by the running CPU, scalar first.
std::vector<const KernelTable*> available_kernels();

// Chosen once per process: the widest supported variant, unless the
// SLICE_ALLOC_SIMD environment variable names one (scalar, avx2, neon).
const KernelTable& active_kernels();

}  // namespace slicing::simd
