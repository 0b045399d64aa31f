// Micro-benchmark for the MinHash kernels: scalar vs the dispatched
// implementation on this machine. Build target: bench_minhash.

#include <chrono>
#include <cstdio>
#include <vector>

#include "textsift/hash.hpp"
#include "textsift/minhash_kernels.hpp"

using namespace sift;

namespace {

double bench_update(kernels::MinhashUpdateFn fn, std::size_t num_perm, std::size_t hashes,
                    int repeats) {
    Rng rng(42);
    std::vector<std::uint64_t> a(num_perm), b(num_perm);
    for (std::size_t i = 0; i < num_perm; ++i) {
        a[i] = rng.next_u64() | 1ULL;
        b[i] = rng.next_u64();
    }
    std::vector<std::uint64_t> xs(hashes);
    for (std::uint64_t& x : xs) {
        x = rng.next_u64();
    }
    std::vector<std::uint64_t> slots(num_perm, ~0ULL);
    double best = 1e100;
    for (int rep = 0; rep < repeats; ++rep) {
        std::fill(slots.begin(), slots.end(), ~0ULL);
        const auto start = std::chrono::steady_clock::now();
        for (std::uint64_t x : xs) {
            fn(x, a.data(), b.data(), slots.data(), num_perm);
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        best = seconds < best ? seconds : best;
    }
    // keep the result alive
    volatile std::uint64_t sink = slots[0];
    (void)sink;
    return static_cast<double>(hashes) * static_cast<double>(num_perm) / best / 1e9;
}

double bench_count(kernels::CountEqualFn fn, std::size_t num_perm, int repeats) {
    Rng rng(7);
    std::vector<std::uint64_t> lhs(num_perm), rhs(num_perm);
    for (std::size_t i = 0; i < num_perm; ++i) {
        lhs[i] = rng.next_u64();
        rhs[i] = rng.bernoulli(0.5) ? lhs[i] : rng.next_u64();
    }
    const int iterations = 2000000;
    double best = 1e100;
    std::size_t sink = 0;
    for (int rep = 0; rep < repeats; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        for (int i = 0; i < iterations; ++i) {
            sink += fn(lhs.data(), rhs.data(), num_perm);
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        best = seconds < best ? seconds : best;
    }
    volatile std::size_t keep = sink;
    (void)keep;
    return static_cast<double>(iterations) * static_cast<double>(num_perm) / best / 1e9;
}

}  // namespace

int main() {
    const std::size_t num_perm = 256;
    const std::size_t hashes = 2000000;
    std::printf("active kernel: %s\n", kernels::active_kernel_name());

    std::printf("minhash_update, %zu perms, %zu shingle hashes\n", num_perm, hashes);
    const double scalar = bench_update(&kernels::minhash_update_scalar, num_perm, hashes, 3);
    std::printf("  scalar:     %6.2f G slot-updates/s\n", scalar);
    const double dispatched = bench_update(kernels::minhash_update(), num_perm, hashes, 3);
    std::printf("  dispatched: %6.2f G slot-updates/s (%.2fx)\n", dispatched,
                dispatched / scalar);

    std::printf("count_equal, %zu slots\n", num_perm);
    const double count_scalar = bench_count(&kernels::count_equal_scalar, num_perm, 3);
    std::printf("  scalar:     %6.2f G compares/s\n", count_scalar);
    const double count_dispatched = bench_count(kernels::count_equal(), num_perm, 3);
    std::printf("  dispatched: %6.2f G compares/s (%.2fx)\n", count_dispatched,
                count_dispatched / count_scalar);
    return 0;
}
