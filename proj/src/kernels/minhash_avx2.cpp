#include "textsift/minhash_kernels.hpp"

#if defined(TEXTSIFT_BUILD_AVX2)

#include <immintrin.h>

namespace sift::kernels {

namespace {

// 64-bit low multiply from 32-bit products (AVX2 has no _mm256_mullo_epi64).
inline __m256i mullo64(__m256i a, __m256i b) {
    const __m256i lo = _mm256_mul_epu32(a, b);
    const __m256i a_hi = _mm256_srli_epi64(a, 32);
    const __m256i b_hi = _mm256_srli_epi64(b, 32);
    const __m256i cross =
        _mm256_add_epi64(_mm256_mul_epu32(a_hi, b), _mm256_mul_epu32(a, b_hi));
    return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

// Unsigned 64-bit min via sign-bias + signed compare.
inline __m256i min_epu64(__m256i a, __m256i b) {
    const __m256i bias = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL));
    const __m256i gt =
        _mm256_cmpgt_epi64(_mm256_xor_si256(a, bias), _mm256_xor_si256(b, bias));
    return _mm256_blendv_epi8(a, b, gt);
}

}  // namespace

void minhash_update_avx2(std::uint64_t x, const std::uint64_t* a, const std::uint64_t* b,
                         std::uint64_t* slots, std::size_t n) {
    const __m256i xv = _mm256_set1_epi64x(static_cast<long long>(x));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i av = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i bv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const __m256i h = _mm256_add_epi64(mullo64(av, xv), bv);
        const __m256i cur = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(slots + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(slots + i), min_epu64(cur, h));
    }
    for (; i < n; ++i) {
        const std::uint64_t h = a[i] * x + b[i];
        if (h < slots[i]) {
            slots[i] = h;
        }
    }
}

std::size_t count_equal_avx2(const std::uint64_t* lhs, const std::uint64_t* rhs, std::size_t n) {
    std::size_t equal = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(lhs + i));
        const __m256i r = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rhs + i));
        const __m256i eq = _mm256_cmpeq_epi64(l, r);
        // One bit per byte; each equal lane contributes 8 set bits.
        equal += static_cast<std::size_t>(
                     __builtin_popcount(static_cast<unsigned>(_mm256_movemask_epi8(eq)))) /
                 8;
    }
    for (; i < n; ++i) {
        equal += lhs[i] == rhs[i] ? 1 : 0;
    }
    return equal;
}

}  // namespace sift::kernels

#endif  // TEXTSIFT_BUILD_AVX2
