#pragma once

#include <cstddef>
#include <utility>

namespace sift {

struct LshParams {
    std::size_t num_perm = 256;
    double threshold = 0.7;
    std::size_t bands = 25;
    std::size_t rows = 10;
    double fp_weight = 0.5;
    double fn_weight = 0.5;

    void validate() const;  // bands*rows <= num_perm, bands,rows >= 1
};

// Probability that two documents of Jaccard similarity s collide in at
// least one band: 1 - (1 - s^r)^b.
double lsh_collision_probability(double s, std::size_t bands, std::size_t rows);

// Exhaustive search over all (b, r) with b*r <= num_perm for the banding
// that minimizes fp_weight*FP + fn_weight*FN, where FP integrates the
// collision curve below the threshold and FN integrates the miss curve
// above it (fixed-step midpoint quadrature).
std::pair<std::size_t, std::size_t> optimal_param(double threshold = 0.7,
                                                  std::size_t num_perm = 256,
                                                  double fp_weight = 0.5,
                                                  double fn_weight = 0.5,
                                                  std::size_t quadrature_steps = 1000);

// LshParams with bands/rows filled in by optimal_param.
LshParams make_lsh_params(double threshold = 0.7, std::size_t num_perm = 256,
                          double fp_weight = 0.5, double fn_weight = 0.5);

}  // namespace sift
