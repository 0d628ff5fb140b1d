#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace slicing::simd::detail {

namespace {

constexpr std::size_t kLanes = 2;

// vmaxq/vminq propagate NaN; select explicitly to keep the scalar semantics.
inline float64x2_t clamp_lanes(float64x2_t p, float64x2_t cap) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    p = vbslq_f64(vcgtq_f64(p, zero), p, zero);
    return vbslq_f64(vcltq_f64(p, cap), p, cap);
}

void waterfill(double weight, double lambda, double p_max, const ChannelRow& row, double* power) {
    const float64x2_t w = vdupq_n_f64(weight);
    const float64x2_t lam = vdupq_n_f64(lambda);
    const float64x2_t ln2 = vdupq_n_f64(kLn2);
    const float64x2_t cap = vdupq_n_f64(p_max);
    std::size_t i = 0;
    for (; i + kLanes <= row.size; i += kLanes) {
        const float64x2_t price = vld1q_f64(row.price + i);
        const float64x2_t gm = vld1q_f64(row.macro_gain + i);
        const float64x2_t g = vld1q_f64(row.own_gain + i);
        const float64x2_t npi = vld1q_f64(row.noise_plus_interference + i);
        const float64x2_t denom = vmulq_f64(ln2, vaddq_f64(lam, vmulq_f64(price, gm)));
        const float64x2_t p = vsubq_f64(vdivq_f64(w, denom), vdivq_f64(npi, g));
        vst1q_f64(power + i, clamp_lanes(p, cap));
    }
    for (; i < row.size; ++i) {
        power[i] = waterfill_one(weight, lambda, p_max, row.price[i], row.macro_gain[i], row.own_gain[i],
                                 row.noise_plus_interference[i]);
    }
}

void lagrangian(double weight, double lambda, const ChannelRow& row, const double* power, double* value) {
    const float64x2_t w = vdupq_n_f64(weight);
    const float64x2_t lam = vdupq_n_f64(lambda);
    const float64x2_t one = vdupq_n_f64(1.0);
    double arg[kLanes];
    std::size_t i = 0;
    for (; i + kLanes <= row.size; i += kLanes) {
        const float64x2_t p = vld1q_f64(power + i);
        const float64x2_t g = vld1q_f64(row.own_gain + i);
        const float64x2_t npi = vld1q_f64(row.noise_plus_interference + i);
        vst1q_f64(arg, vaddq_f64(one, vdivq_f64(vmulq_f64(p, g), npi)));
        for (double& a : arg) a = std::log2(a);
        const float64x2_t se = vld1q_f64(arg);
        const float64x2_t price = vld1q_f64(row.price + i);
        const float64x2_t gm = vld1q_f64(row.macro_gain + i);
        const float64x2_t cost = vmulq_f64(vaddq_f64(lam, vmulq_f64(price, gm)), p);
        vst1q_f64(value + i, vsubq_f64(vmulq_f64(w, se), cost));
    }
    for (; i < row.size; ++i) {
        value[i] = lagrangian_one(weight, lambda, power[i], row.price[i], row.macro_gain[i], row.own_gain[i],
                                  row.noise_plus_interference[i]);
    }
}

void spectral_efficiency(const double* power, const double* gain, const double* npi, double* out,
                         std::size_t n) {
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float64x2_t r = vdivq_f64(vmulq_f64(vld1q_f64(power + i), vld1q_f64(gain + i)), vld1q_f64(npi + i));
        vst1q_f64(out + i, vaddq_f64(one, r));
        for (std::size_t j = 0; j < kLanes; ++j) out[i + j] = std::log2(out[i + j]);
    }
    for (; i < n; ++i) out[i] = spectral_efficiency_one(power[i], gain[i], npi[i]);
}

void accumulate_product(const double* a, const double* b, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
    for (; i < n; ++i) acc[i] += a[i] * b[i];
}

}  // namespace

const KernelTable& neon_kernels() {
    static const KernelTable table{"neon", waterfill, lagrangian, spectral_efficiency, accumulate_product};
    return table;
}

}  // namespace slicing::simd::detail
