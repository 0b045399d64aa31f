#pragma once

#include <cstdint>
#include <string_view>

namespace sift {

// FNV-1a, used wherever a stable cross-platform string hash is needed
// (std::hash is implementation-defined and would break reproducibility).
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mixes several 64-bit values into one; used for named seed derivation.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// All randomness in the pipeline flows from one global seed through named
// derivations, so stages and per-document draws are individually stable.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view name, std::uint64_t index = 0) {
    return mix64(mix64(global_seed, fnv1a64(name)), index);
}

// Minimal deterministic generator (splitmix64 stream). Unlike the <random>
// distributions, the mapping to doubles here is fixed by this code, which
// keeps outputs byte-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Modulo bias is < 2^-53 for the n used here (counts, spans).
        return n == 0 ? 0 : next_u64() % n;
    }

    bool bernoulli(double p) { return next_double() < p; }

  private:
    std::uint64_t state_;
};

}  // namespace sift
