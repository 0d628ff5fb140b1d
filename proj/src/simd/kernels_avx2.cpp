#include <immintrin.h>

#include "kernels_internal.hpp"

namespace slicing::simd::detail {

namespace {

constexpr std::size_t kLanes = 4;

void waterfill(double weight, double lambda, double p_max, const ChannelRow& row, double* power) {
    const __m256d w = _mm256_set1_pd(weight);
    const __m256d lam = _mm256_set1_pd(lambda);
    const __m256d ln2 = _mm256_set1_pd(kLn2);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d cap = _mm256_set1_pd(p_max);
    std::size_t i = 0;
    for (; i + kLanes <= row.size; i += kLanes) {
        const __m256d price = _mm256_loadu_pd(row.price + i);
        const __m256d gm = _mm256_loadu_pd(row.macro_gain + i);
        const __m256d g = _mm256_loadu_pd(row.own_gain + i);
        const __m256d npi = _mm256_loadu_pd(row.noise_plus_interference + i);
        const __m256d denom = _mm256_mul_pd(ln2, _mm256_add_pd(lam, _mm256_mul_pd(price, gm)));
        const __m256d level = _mm256_div_pd(w, denom);
        __m256d p = _mm256_sub_pd(level, _mm256_div_pd(npi, g));
        p = _mm256_max_pd(p, zero);
        p = _mm256_min_pd(p, cap);
        _mm256_storeu_pd(power + i, p);
    }
    for (; i < row.size; ++i) {
        power[i] = waterfill_one(weight, lambda, p_max, row.price[i], row.macro_gain[i], row.own_gain[i],
                                 row.noise_plus_interference[i]);
    }
}

// Vectorised ratio, per-lane log2, vectorised combination.
void lagrangian(double weight, double lambda, const ChannelRow& row, const double* power, double* value) {
    const __m256d w = _mm256_set1_pd(weight);
    const __m256d lam = _mm256_set1_pd(lambda);
    const __m256d one = _mm256_set1_pd(1.0);
    alignas(32) double arg[kLanes];
    std::size_t i = 0;
    for (; i + kLanes <= row.size; i += kLanes) {
        const __m256d p = _mm256_loadu_pd(power + i);
        const __m256d g = _mm256_loadu_pd(row.own_gain + i);
        const __m256d npi = _mm256_loadu_pd(row.noise_plus_interference + i);
        _mm256_store_pd(arg, _mm256_add_pd(one, _mm256_div_pd(_mm256_mul_pd(p, g), npi)));
        for (double& a : arg) a = std::log2(a);
        const __m256d se = _mm256_load_pd(arg);
        const __m256d price = _mm256_loadu_pd(row.price + i);
        const __m256d gm = _mm256_loadu_pd(row.macro_gain + i);
        const __m256d cost = _mm256_mul_pd(_mm256_add_pd(lam, _mm256_mul_pd(price, gm)), p);
        _mm256_storeu_pd(value + i, _mm256_sub_pd(_mm256_mul_pd(w, se), cost));
    }
    for (; i < row.size; ++i) {
        value[i] = lagrangian_one(weight, lambda, power[i], row.price[i], row.macro_gain[i], row.own_gain[i],
                                  row.noise_plus_interference[i]);
    }
}

void spectral_efficiency(const double* power, const double* gain, const double* npi, double* out,
                         std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d p = _mm256_loadu_pd(power + i);
        const __m256d g = _mm256_loadu_pd(gain + i);
        const __m256d d = _mm256_loadu_pd(npi + i);
        _mm256_storeu_pd(out + i, _mm256_add_pd(one, _mm256_div_pd(_mm256_mul_pd(p, g), d)));
        for (std::size_t j = 0; j < kLanes; ++j) out[i + j] = std::log2(out[i + j]);
    }
    for (; i < n; ++i) out[i] = spectral_efficiency_one(power[i], gain[i], npi[i]);
}

void accumulate_product(const double* a, const double* b, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), prod));
    }
    for (; i < n; ++i) acc[i] += a[i] * b[i];
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{"avx2", waterfill, lagrangian, spectral_efficiency, accumulate_product};
    return table;
}

}  // namespace slicing::simd::detail
