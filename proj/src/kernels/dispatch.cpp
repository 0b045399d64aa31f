#include "textsift/minhash_kernels.hpp"

#include <cstdlib>

namespace sift::kernels {

namespace {

bool force_scalar() {
    const char* env = std::getenv("TEXTSIFT_FORCE_SCALAR");
    return env != nullptr && env[0] != '\0' && env[0] != '0';
}

bool use_avx2() {
#if defined(TEXTSIFT_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool available = __builtin_cpu_supports("avx2") && !force_scalar();
    return available;
#else
    return false;
#endif
}

}  // namespace

MinhashUpdateFn minhash_update() {
#if defined(TEXTSIFT_BUILD_AVX2)
    if (use_avx2()) {
        return &minhash_update_avx2;
    }
#endif
    return &minhash_update_scalar;
}

CountEqualFn count_equal() {
#if defined(TEXTSIFT_BUILD_AVX2)
    if (use_avx2()) {
        return &count_equal_avx2;
    }
#endif
    return &count_equal_scalar;
}

const char* active_kernel_name() {
    return use_avx2() ? "avx2" : "scalar";
}

}  // namespace sift::kernels
