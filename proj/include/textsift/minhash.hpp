#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace sift {

struct MinHashSignature {
    std::vector<std::uint64_t> slots;
    std::uint64_t seed = 0;

    // Value every slot holds for the empty set.
    static constexpr std::uint64_t kEmptySlot = ~0ULL;
};

// Distinct word n-gram shingles. Fewer than n words yields the whole
// sequence as one shingle, so every document (including an empty one) has
// a non-empty shingle set.
std::set<std::string> shingles(const std::vector<std::string>& words, std::size_t n = 5);

// Precomputed affine permutation family for one (num_perm, seed) pair.
class MinHasher {
  public:
    MinHasher(std::size_t num_perm, std::uint64_t seed);

    MinHashSignature compute(const std::set<std::string>& shingle_set) const;

    std::size_t num_perm() const { return mul_.size(); }
    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::vector<std::uint64_t> mul_;  // odd multipliers
    std::vector<std::uint64_t> add_;
};

// Fraction of agreeing slots; unbiased estimator of the exact Jaccard
// similarity. Throws std::invalid_argument on seed or size mismatch.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// Brute-force |A∩B|/|A∪B|; both sets empty -> 1.0 by convention.
double exact_jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

}  // namespace sift
