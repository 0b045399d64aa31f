#include "textsift/minhash.hpp"

#include <stdexcept>

#include "textsift/hash.hpp"
#include "textsift/minhash_kernels.hpp"

namespace sift {

std::set<std::string> shingles(const std::vector<std::string>& words, std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("shingle n must be >= 1");
    }
    std::set<std::string> out;
    // '\x1f' joins words so shingle boundaries stay unambiguous.
    if (words.size() < n) {
        std::string whole;
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (i > 0) {
                whole.push_back('\x1f');
            }
            whole += words[i];
        }
        out.insert(std::move(whole));
        return out;
    }
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
        std::string shingle;
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                shingle.push_back('\x1f');
            }
            shingle += words[i + j];
        }
        out.insert(std::move(shingle));
    }
    return out;
}

MinHasher::MinHasher(std::size_t num_perm, std::uint64_t seed) : seed_(seed) {
    if (num_perm < 1) {
        throw std::invalid_argument("num_perm must be >= 1");
    }
    mul_.resize(num_perm);
    add_.resize(num_perm);
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < num_perm; ++i) {
        mul_[i] = splitmix64(state) | 1ULL;  // odd => bijective over 2^64
        add_[i] = splitmix64(state);
    }
}

MinHashSignature MinHasher::compute(const std::set<std::string>& shingle_set) const {
    MinHashSignature sig;
    sig.seed = seed_;
    sig.slots.assign(mul_.size(), MinHashSignature::kEmptySlot);
    const auto update = kernels::minhash_update();
    for (const std::string& shingle : shingle_set) {
        // FNV alone avalanches poorly on short strings, which correlates
        // the per-permutation minima; run it through a strong finalizer.
        std::uint64_t x = fnv1a64(shingle);
        x = splitmix64(x);
        update(x, mul_.data(), add_.data(), sig.slots.data(), sig.slots.size());
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.seed != b.seed) {
        throw std::invalid_argument("cannot compare signatures with different seeds");
    }
    if (a.slots.size() != b.slots.size() || a.slots.empty()) {
        throw std::invalid_argument("cannot compare signatures with different num_perm");
    }
    const std::size_t equal =
        kernels::count_equal()(a.slots.data(), b.slots.data(), a.slots.size());
    return static_cast<double>(equal) / static_cast<double>(a.slots.size());
}

double exact_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t intersection = 0;
    const std::set<std::string>& small = a.size() <= b.size() ? a : b;
    const std::set<std::string>& large = a.size() <= b.size() ? b : a;
    for (const std::string& item : small) {
        if (large.count(item)) {
            ++intersection;
        }
    }
    const std::size_t uni = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

}  // namespace sift
