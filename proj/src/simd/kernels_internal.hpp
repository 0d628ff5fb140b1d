#pragma once

#include "slicing/simd/kernels.hpp"

namespace slicing::simd::detail {

#if defined(SLICING_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif
#if defined(SLICING_HAVE_NEON)
const KernelTable& neon_kernels();
#endif

}  // namespace slicing::simd::detail
