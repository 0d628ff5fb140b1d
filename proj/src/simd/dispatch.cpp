#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace slicing::simd {

namespace {

bool cpu_has_avx2() {
#if defined(SLICING_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable& select() {
    const auto available = available_kernels();
    const char* env = std::getenv("SLICE_ALLOC_SIMD");
    if (env != nullptr && std::string_view(env) != "auto") {
        for (const KernelTable* k : available)
            if (k->name == env) return *k;
        return scalar_kernels();
    }
    return *available.back();
}

}  // namespace

std::vector<const KernelTable*> available_kernels() {
    std::vector<const KernelTable*> out{&scalar_kernels()};
#if defined(SLICING_HAVE_AVX2)
    if (cpu_has_avx2()) out.push_back(&detail::avx2_kernels());
#endif
#if defined(SLICING_HAVE_NEON)
    out.push_back(&detail::neon_kernels());
#endif
    return out;
}

const KernelTable& active_kernels() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace slicing::simd
