#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sift {

// One proxy-run observation: the data mixture it trained on, its learning
// rate, and the resulting per-dataset validation losses.
struct ProxyRunRecord {
    std::map<std::string, double> mixture;  // simplex proportions
    double learning_rate = 0.0;
    std::map<std::string, double> losses;
    std::uint64_t tokens = 0;

    void validate() const;  // proportions sum to 1, losses positive
};

std::vector<ProxyRunRecord> read_proxy_runs(const std::string& path);
void write_proxy_runs(const std::vector<ProxyRunRecord>& records, const std::string& path);

// Learning-rate grid: k+1 boundaries splitting [lo, hi] into k equal
// log-space intervals.
std::vector<double> lr_grid(double lo = 1e-5, double hi = 4e-4, std::size_t k = 20);

// Samples one learning rate: a uniform interval of the grid, evaluated at
// its geometric midpoint.
double sample_lr(const std::vector<double>& grid, std::uint64_t seed);

// Uniform sample from the simplex over `keys` (symmetric Dirichlet(1)).
std::map<std::string, double> sample_mixture(const std::vector<std::string>& keys,
                                             std::uint64_t seed);

// Product of individual losses.
double joint_loss(const std::map<std::string, double>& losses);

enum class MagicTag { Source, Target };

// ln(proportion) - ln(lr) for the source domain, ln(proportion) + ln(lr)
// for the target domain.
double magic_metric(double proportion, double lr, MagicTag tag);

struct QuadraticFit {
    double a = 0.0, b = 0.0, c = 0.0;  // y = a x^2 + b x + c
    double rss = 0.0;
    MagicTag tag = MagicTag::Source;
    double x_min = 0.0, x_max = 0.0;  // fitted range

    double operator()(double x) const { return (a * x + b) * x + c; }
};

// Least-squares quadratic; exact on noise-free quadratic data. Throws on
// fewer than 3 distinct x values.
QuadraticFit fit_quadratic(const std::vector<std::pair<double, double>>& points);

// Acceptable interval of the magic metric: where fit(x) <= baseline + delta,
// clamped to the fitted range. `boundary` is the retention-side (left)
// endpoint beyond which larger x keeps the loss acceptable.
struct BoundaryResult {
    bool found = false;
    double boundary = 0.0;   // left endpoint of the acceptable interval
    double upper = 0.0;      // right endpoint (fit range or second root)
};

BoundaryResult estimate_boundary(const QuadraticFit& fit, double baseline_loss, double delta);

enum class SurrogateTarget { JointLoss, LogJointLoss };

// Linear surrogate from mixture proportions to the (log) joint loss. The
// proportions sum to 1, so a separate intercept column would be collinear
// with them; the model is y = sum_i w_i p_i and `intercept` stays 0 unless
// the lr feature mode adds ln(lr) as an extra input.
struct SurrogateModel {
    std::vector<std::string> keys;
    std::vector<double> weights;  // one per key
    double intercept = 0.0;
    double lr_weight = 0.0;       // coefficient of ln(lr) when enabled
    bool uses_lr_feature = false;
    double r2 = 0.0;
    SurrogateTarget target = SurrogateTarget::JointLoss;

    double predict(const std::map<std::string, double>& mixture, double lr = 0.0) const;
};

// OLS fit; requires at least keys+1 records, all sharing one learning rate
// (unless include_lr_feature is set).
SurrogateModel fit_surrogate(const std::vector<ProxyRunRecord>& records,
                             SurrogateTarget target = SurrogateTarget::JointLoss,
                             bool include_lr_feature = false);

struct SimulationResult {
    std::map<std::string, double> best_mixture;
    double predicted = 0.0;
    std::size_t best_index = 0;
};

// Draws n seeded simplex samples (prefix-stable in n), evaluates the
// surrogate and returns the argmin. Deterministic per seed and independent
// of worker count.
SimulationResult simulate(const SurrogateModel& model, std::size_t n, std::uint64_t seed,
                          std::size_t workers = 1);

}  // namespace sift
