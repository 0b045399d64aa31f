#pragma once

#include <cstddef>
#include <cstdint>

// The two data-parallel inner loops of MinHash: updating all permutation
// slots with one shingle hash, and counting agreeing slots between two
// signatures. Scalar reference kernels define the semantics; the AVX2
// variants are bit-identical and selected at runtime. Set
// TEXTSIFT_FORCE_SCALAR=1 in the environment to pin the scalar path.

namespace sift::kernels {

// slots[i] = min(slots[i], a[i]*x + b[i]) with wrapping 64-bit arithmetic.
// Each a[i] is odd, so x -> a[i]*x + b[i] permutes the 64-bit space.
using MinhashUpdateFn = void (*)(std::uint64_t x, const std::uint64_t* a, const std::uint64_t* b,
                                 std::uint64_t* slots, std::size_t n);

using CountEqualFn = std::size_t (*)(const std::uint64_t* lhs, const std::uint64_t* rhs,
                                     std::size_t n);

void minhash_update_scalar(std::uint64_t x, const std::uint64_t* a, const std::uint64_t* b,
                           std::uint64_t* slots, std::size_t n);
std::size_t count_equal_scalar(const std::uint64_t* lhs, const std::uint64_t* rhs, std::size_t n);

#if defined(TEXTSIFT_BUILD_AVX2)
void minhash_update_avx2(std::uint64_t x, const std::uint64_t* a, const std::uint64_t* b,
                         std::uint64_t* slots, std::size_t n);
std::size_t count_equal_avx2(const std::uint64_t* lhs, const std::uint64_t* rhs, std::size_t n);
#endif

MinhashUpdateFn minhash_update();
CountEqualFn count_equal();

// "avx2" or "scalar"; what the dispatcher picked on this machine.
const char* active_kernel_name();

}  // namespace sift::kernels
