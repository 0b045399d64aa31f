#include "textsift/lsh.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sift {

void LshParams::validate() const {
    if (bands < 1 || rows < 1 || bands * rows > num_perm) {
        throw std::invalid_argument("lsh params: need bands,rows >= 1 and bands*rows <= num_perm");
    }
    if (threshold < 0.0 || threshold > 1.0) {
        throw std::invalid_argument("lsh params: threshold must be in [0,1]");
    }
}

double lsh_collision_probability(double s, std::size_t bands, std::size_t rows) {
    return 1.0 - std::pow(1.0 - std::pow(s, static_cast<double>(rows)),
                          static_cast<double>(bands));
}

namespace {

// Midpoint quadrature of the collision curve over [lo, hi].
double integrate_collision(double lo, double hi, std::size_t b, std::size_t r,
                           std::size_t steps) {
    if (hi <= lo) {
        return 0.0;
    }
    const double h = (hi - lo) / static_cast<double>(steps);
    double sum = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double s = lo + (static_cast<double>(i) + 0.5) * h;
        sum += lsh_collision_probability(s, b, r);
    }
    return sum * h;
}

}  // namespace

std::pair<std::size_t, std::size_t> optimal_param(double threshold, std::size_t num_perm,
                                                  double fp_weight, double fn_weight,
                                                  std::size_t quadrature_steps) {
    if (num_perm < 1) {
        throw std::invalid_argument("optimal_param: num_perm must be >= 1");
    }
    if (threshold < 0.0 || threshold > 1.0) {
        throw std::invalid_argument("optimal_param: threshold must be in [0,1]");
    }
    double best_error = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best{1, 1};
    for (std::size_t b = 1; b <= num_perm; ++b) {
        const std::size_t max_r = num_perm / b;
        for (std::size_t r = 1; r <= max_r; ++r) {
            const double fp = integrate_collision(0.0, threshold, b, r, quadrature_steps);
            // FN = integral of (1 - P(s)) over [threshold, 1].
            const double fn = (1.0 - threshold) -
                              integrate_collision(threshold, 1.0, b, r, quadrature_steps);
            const double error = fp_weight * fp + fn_weight * fn;
            if (error < best_error) {
                best_error = error;
                best = {b, r};
            }
        }
    }
    return best;
}

LshParams make_lsh_params(double threshold, std::size_t num_perm, double fp_weight,
                          double fn_weight) {
    LshParams params;
    params.num_perm = num_perm;
    params.threshold = threshold;
    params.fp_weight = fp_weight;
    params.fn_weight = fn_weight;
    const auto [b, r] = optimal_param(threshold, num_perm, fp_weight, fn_weight);
    params.bands = b;
    params.rows = r;
    params.validate();
    return params;
}

}  // namespace sift
