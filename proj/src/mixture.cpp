#include "textsift/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "textsift/hash.hpp"

namespace sift {

void ProxyRunRecord::validate() const {
    double sum = 0.0;
    for (const auto& [key, p] : mixture) {
        if (p < 0.0) {
            throw std::invalid_argument("mixture proportion for \"" + key + "\" is negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("mixture proportions must sum to 1 (got " +
                                    std::to_string(sum) + ")");
    }
    if (learning_rate <= 0.0) {
        throw std::invalid_argument("learning rate must be positive");
    }
    for (const auto& [key, loss] : losses) {
        if (loss <= 0.0) {
            throw std::invalid_argument("loss for \"" + key + "\" must be positive");
        }
    }
}

std::vector<ProxyRunRecord> read_proxy_runs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open proxy-run file: " + path);
    }
    std::vector<ProxyRunRecord> records;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("proxy-run line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        ProxyRunRecord record;
        for (const auto& [key, value] : j.at("mixture").items()) {
            record.mixture[key] = value.get<double>();
        }
        record.learning_rate = j.at("lr").get<double>();
        for (const auto& [key, value] : j.at("losses").items()) {
            record.losses[key] = value.get<double>();
        }
        record.tokens = j.value("tokens", 0ULL);
        record.validate();
        records.push_back(std::move(record));
    }
    return records;
}

void write_proxy_runs(const std::vector<ProxyRunRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw std::runtime_error("cannot open proxy-run file for writing: " + path);
    }
    for (const ProxyRunRecord& record : records) {
        nlohmann::ordered_json j;
        j["mixture"] = record.mixture;
        j["lr"] = record.learning_rate;
        j["losses"] = record.losses;
        j["tokens"] = record.tokens;
        out << j.dump() << '\n';
    }
}

std::vector<double> lr_grid(double lo, double hi, std::size_t k) {
    if (!(0.0 < lo && lo < hi) || k < 1) {
        throw std::invalid_argument("lr_grid: need 0 < lo < hi and k >= 1");
    }
    std::vector<double> boundaries(k + 1);
    const double ratio = hi / lo;
    for (std::size_t i = 0; i <= k; ++i) {
        boundaries[i] = lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(k));
    }
    boundaries[0] = lo;
    boundaries[k] = hi;
    return boundaries;
}

double sample_lr(const std::vector<double>& grid, std::uint64_t seed) {
    if (grid.size() < 2) {
        throw std::invalid_argument("lr grid needs at least one interval");
    }
    Rng rng(seed);
    const std::size_t interval = rng.next_below(grid.size() - 1);
    return std::sqrt(grid[interval] * grid[interval + 1]);  // geometric midpoint
}

namespace {

std::map<std::string, double> sample_simplex(const std::vector<std::string>& keys, Rng& rng) {
    // Normalized Exp(1) draws == symmetric Dirichlet(1) == uniform simplex.
    std::map<std::string, double> mixture;
    double sum = 0.0;
    std::vector<double> draws(keys.size());
    for (double& d : draws) {
        d = -std::log(1.0 - rng.next_double());
        sum += d;
    }
    if (sum == 0.0) {
        for (double& d : draws) {
            d = 1.0;
        }
        sum = static_cast<double>(draws.size());
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        mixture[keys[i]] = draws[i] / sum;
    }
    return mixture;
}

}  // namespace

std::map<std::string, double> sample_mixture(const std::vector<std::string>& keys,
                                             std::uint64_t seed) {
    if (keys.empty()) {
        throw std::invalid_argument("sample_mixture needs at least one key");
    }
    Rng rng(seed);
    return sample_simplex(keys, rng);
}

double joint_loss(const std::map<std::string, double>& losses) {
    if (losses.empty()) {
        throw std::invalid_argument("joint_loss needs at least one loss");
    }
    double product = 1.0;
    for (const auto& [key, loss] : losses) {
        if (loss <= 0.0) {
            throw std::invalid_argument("loss for \"" + key + "\" must be positive");
        }
        product *= loss;
    }
    return product;
}

double magic_metric(double proportion, double lr, MagicTag tag) {
    if (proportion <= 0.0 || lr <= 0.0) {
        throw std::invalid_argument("magic_metric needs positive proportion and learning rate");
    }
    const double lp = std::log(proportion);
    const double llr = std::log(lr);
    return tag == MagicTag::Source ? lp - llr : lp + llr;
}

namespace {

// Solves the symmetric system A x = b in place, Gaussian elimination with
// partial pivoting. Throws on (near-)singular A.
std::vector<double> solve_linear(std::vector<std::vector<long double>> a,
                                 std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::abs(static_cast<double>(a[row][col])) >
                std::abs(static_cast<double>(a[pivot][col]))) {
                pivot = row;
            }
        }
        if (std::abs(static_cast<double>(a[pivot][col])) < 1e-30) {
            throw std::invalid_argument("rank-deficient design matrix");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const long double factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double sum = b[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            sum -= a[i][k] * x[k];
        }
        x[i] = static_cast<double>(sum / a[i][i]);
    }
    return x;
}

}  // namespace

QuadraticFit fit_quadratic(const std::vector<std::pair<double, double>>& points) {
    std::set<double> distinct;
    for (const auto& [x, y] : points) {
        distinct.insert(x);
    }
    if (distinct.size() < 3) {
        throw std::invalid_argument("fit_quadratic needs at least 3 distinct x values");
    }
    std::vector<std::vector<long double>> ata(3, std::vector<long double>(3, 0.0L));
    std::vector<long double> atb(3, 0.0L);
    for (const auto& [x, y] : points) {
        const long double features[3] = {static_cast<long double>(x) * x,
                                         static_cast<long double>(x), 1.0L};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                ata[i][j] += features[i] * features[j];
            }
            atb[i] += features[i] * y;
        }
    }
    const std::vector<double> coeffs = solve_linear(std::move(ata), std::move(atb));
    QuadraticFit fit;
    fit.a = coeffs[0];
    fit.b = coeffs[1];
    fit.c = coeffs[2];
    fit.x_min = *distinct.begin();
    fit.x_max = *distinct.rbegin();
    for (const auto& [x, y] : points) {
        const double r = y - fit(x);
        fit.rss += r * r;
    }
    return fit;
}

BoundaryResult estimate_boundary(const QuadraticFit& fit, double baseline_loss, double delta) {
    if (delta <= 0.0) {
        throw std::invalid_argument("estimate_boundary needs delta > 0");
    }
    const double limit = baseline_loss + delta;
    BoundaryResult result;
    const double lo = fit.x_min;
    const double hi = fit.x_max;

    const auto report = [&](double left, double right) {
        const double clamped_left = std::max(left, lo);
        const double clamped_right = std::min(right, hi);
        if (clamped_left <= clamped_right) {
            result.found = true;
            result.boundary = clamped_left;
            result.upper = clamped_right;
        }
    };

    if (fit.a == 0.0) {
        if (fit.b == 0.0) {
            if (fit.c <= limit) {
                report(lo, hi);
            }
            return result;
        }
        const double root = (limit - fit.c) / fit.b;
        if (fit.b > 0.0) {
            report(lo, root);  // increasing line: acceptable on the left
        } else {
            report(root, hi);  // decreasing line: acceptable on the right
        }
        return result;
    }

    const double disc = fit.b * fit.b - 4.0 * fit.a * (fit.c - limit);
    if (fit.a > 0.0) {
        if (disc < 0.0) {
            return result;  // parabola never dips to the limit
        }
        const double sq = std::sqrt(disc);
        report((-fit.b - sq) / (2.0 * fit.a), (-fit.b + sq) / (2.0 * fit.a));
        return result;
    }
    // a < 0: acceptable outside the roots; prefer the retention side
    // (larger x), falling back to the left interval.
    if (disc < 0.0) {
        report(lo, hi);
        return result;
    }
    const double sq = std::sqrt(disc);
    const double r1 = (-fit.b + sq) / (2.0 * fit.a);  // smaller (a < 0)
    const double r2 = (-fit.b - sq) / (2.0 * fit.a);
    report(r2, hi);
    if (!result.found) {
        report(lo, r1);
    }
    return result;
}

double SurrogateModel::predict(const std::map<std::string, double>& mixture, double lr) const {
    double y = intercept;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto hit = mixture.find(keys[i]);
        if (hit != mixture.end()) {
            y += weights[i] * hit->second;
        }
    }
    if (uses_lr_feature) {
        if (lr <= 0.0) {
            throw std::invalid_argument("surrogate with lr feature needs a positive lr");
        }
        y += lr_weight * std::log(lr);
    }
    return y;
}

SurrogateModel fit_surrogate(const std::vector<ProxyRunRecord>& records, SurrogateTarget target,
                             bool include_lr_feature) {
    std::set<std::string> key_set;
    for (const ProxyRunRecord& record : records) {
        record.validate();
        for (const auto& [key, p] : record.mixture) {
            key_set.insert(key);
        }
    }
    SurrogateModel model;
    model.target = target;
    model.keys.assign(key_set.begin(), key_set.end());
    const std::size_t k = model.keys.size();
    if (k == 0) {
        throw std::invalid_argument("fit_surrogate: records carry no mixture keys");
    }
    if (records.size() < k + 1) {
        throw std::invalid_argument("fit_surrogate needs at least keys+1 records (" +
                                    std::to_string(k + 1) + ", got " +
                                    std::to_string(records.size()) + ")");
    }
    if (!include_lr_feature) {
        for (const ProxyRunRecord& record : records) {
            if (std::abs(record.learning_rate - records.front().learning_rate) >
                1e-12 * records.front().learning_rate) {
                throw std::invalid_argument(
                    "fit_surrogate expects one predetermined learning rate; pass "
                    "include_lr_feature to fit across rates");
            }
        }
    }
    model.uses_lr_feature = include_lr_feature;

    const std::size_t dim = k + (include_lr_feature ? 1 : 0);
    std::vector<std::vector<long double>> ata(dim, std::vector<long double>(dim, 0.0L));
    std::vector<long double> atb(dim, 0.0L);
    std::vector<double> targets;
    targets.reserve(records.size());
    std::vector<double> features(dim);
    for (const ProxyRunRecord& record : records) {
        const double joint = joint_loss(record.losses);
        const double y = target == SurrogateTarget::JointLoss ? joint : std::log(joint);
        targets.push_back(y);
        for (std::size_t i = 0; i < k; ++i) {
            const auto hit = record.mixture.find(model.keys[i]);
            features[i] = hit != record.mixture.end() ? hit->second : 0.0;
        }
        if (include_lr_feature) {
            features[k] = std::log(record.learning_rate);
        }
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                ata[i][j] += static_cast<long double>(features[i]) * features[j];
            }
            atb[i] += static_cast<long double>(features[i]) * y;
        }
    }
    const std::vector<double> solution = solve_linear(std::move(ata), std::move(atb));
    model.weights.assign(solution.begin(), solution.begin() + k);
    if (include_lr_feature) {
        model.lr_weight = solution[k];
    }

    double mean = 0.0;
    for (double y : targets) {
        mean += y;
    }
    mean /= static_cast<double>(targets.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const double predicted =
            model.predict(records[r].mixture, records[r].learning_rate);
        ss_res += (targets[r] - predicted) * (targets[r] - predicted);
        ss_tot += (targets[r] - mean) * (targets[r] - mean);
    }
    model.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return model;
}

SimulationResult simulate(const SurrogateModel& model, std::size_t n, std::uint64_t seed,
                          std::size_t workers) {
    if (n < 1) {
        throw std::invalid_argument("simulate needs n >= 1");
    }
    if (model.uses_lr_feature) {
        throw std::invalid_argument("simulate expects a fixed-lr surrogate");
    }
    struct Best {
        double value = 0.0;
        std::size_t index = 0;
        bool set = false;
    };
    const std::size_t num_workers = std::max<std::size_t>(1, workers);
    std::vector<Best> best_per_worker(num_workers);

    const auto run_worker = [&](std::size_t w) {
        Best& best = best_per_worker[w];
        std::vector<double> draws(model.keys.size());
        for (std::size_t i = w; i < n; i += num_workers) {
            Rng rng(derive_seed(seed, "simulate", i));
            double sum = 0.0;
            for (double& d : draws) {
                d = -std::log(1.0 - rng.next_double());
                sum += d;
            }
            double y = model.intercept;
            for (std::size_t j = 0; j < draws.size(); ++j) {
                y += model.weights[j] * (draws[j] / sum);
            }
            if (!best.set || y < best.value || (y == best.value && i < best.index)) {
                best.value = y;
                best.index = i;
                best.set = true;
            }
        }
    };

    if (num_workers == 1) {
        run_worker(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(num_workers);
        for (std::size_t w = 0; w < num_workers; ++w) {
            threads.emplace_back(run_worker, w);
        }
        for (std::thread& t : threads) {
            t.join();
        }
    }

    Best overall;
    for (const Best& candidate : best_per_worker) {
        if (!candidate.set) {
            continue;
        }
        if (!overall.set || candidate.value < overall.value ||
            (candidate.value == overall.value && candidate.index < overall.index)) {
            overall = candidate;
        }
    }

    SimulationResult result;
    result.best_index = overall.index;
    Rng rng(derive_seed(seed, "simulate", overall.index));
    result.best_mixture = sample_simplex(model.keys, rng);
    result.predicted = model.predict(result.best_mixture);
    return result;
}

}  // namespace sift
