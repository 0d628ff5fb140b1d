#include "slicing/simd/kernels.hpp"

namespace slicing::simd {

namespace {

void waterfill(double weight, double lambda, double p_max, const ChannelRow& row, double* power) {
    for (std::size_t i = 0; i < row.size; ++i) {
        power[i] = waterfill_one(weight, lambda, p_max, row.price[i], row.macro_gain[i], row.own_gain[i],
                                 row.noise_plus_interference[i]);
    }
}

void lagrangian(double weight, double lambda, const ChannelRow& row, const double* power, double* value) {
    for (std::size_t i = 0; i < row.size; ++i) {
        value[i] = lagrangian_one(weight, lambda, power[i], row.price[i], row.macro_gain[i], row.own_gain[i],
                                  row.noise_plus_interference[i]);
    }
}

void spectral_efficiency(const double* power, const double* gain, const double* npi, double* out,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = spectral_efficiency_one(power[i], gain[i], npi[i]);
}

void accumulate_product(const double* a, const double* b, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += a[i] * b[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", waterfill, lagrangian, spectral_efficiency, accumulate_product};
    return table;
}

}  // namespace slicing::simd
