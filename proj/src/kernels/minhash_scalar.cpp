#include "textsift/minhash_kernels.hpp"

namespace sift::kernels {

void minhash_update_scalar(std::uint64_t x, const std::uint64_t* a, const std::uint64_t* b,
                           std::uint64_t* slots, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t h = a[i] * x + b[i];
        if (h < slots[i]) {
            slots[i] = h;
        }
    }
}

std::size_t count_equal_scalar(const std::uint64_t* lhs, const std::uint64_t* rhs,
                               std::size_t n) {
    std::size_t equal = 0;
    for (std::size_t i = 0; i < n; ++i) {
        equal += lhs[i] == rhs[i] ? 1 : 0;
    }
    return equal;
}

}  // namespace sift::kernels
