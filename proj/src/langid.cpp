#include "textsift/langid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "textsift/utf8.hpp"

namespace sift {

std::vector<std::string> LangIdModel::extract_grams(const std::string& text) const {
    const std::vector<char32_t> cps = utf8::decode_all(text);
    std::vector<std::string> grams;
    if (cps.size() < order_) {
        if (!cps.empty()) {
            grams.push_back(utf8::encode_all(cps));
        }
        return grams;
    }
    grams.reserve(cps.size());
    for (std::size_t i = 0; i + order_ <= cps.size(); ++i) {
        std::string gram;
        for (std::size_t j = 0; j < order_; ++j) {
            utf8::encode(cps[i + j], gram);
        }
        grams.push_back(std::move(gram));
    }
    return grams;
}

LangIdModel LangIdModel::train(
    const std::map<std::string, std::vector<std::string>>& corpus_by_lang, std::size_t order) {
    if (corpus_by_lang.size() < 2) {
        throw std::invalid_argument("langid training needs at least 2 language classes");
    }
    if (order < 1) {
        throw std::invalid_argument("langid order must be >= 1");
    }
    LangIdModel model;
    model.order_ = order;
    std::set<std::string> all_grams;
    for (const auto& [lang, lines] : corpus_by_lang) {
        model.classes_.push_back(lang);
        model.gram_counts_.emplace_back();
        model.total_grams_.push_back(0);
        auto& counts = model.gram_counts_.back();
        auto& total = model.total_grams_.back();
        for (const std::string& line : lines) {
            for (std::string& gram : model.extract_grams(line)) {
                all_grams.insert(gram);
                ++counts[gram];
                ++total;
            }
        }
        if (total == 0) {
            throw std::invalid_argument("langid training corpus for \"" + lang + "\" is empty");
        }
    }
    model.distinct_grams_ = all_grams.size();
    return model;
}

std::map<std::string, double> LangIdModel::posteriors(const std::string& text) const {
    if (classes_.empty()) {
        throw std::logic_error("langid model is not trained");
    }
    const std::vector<std::string> grams = extract_grams(text);
    // Uniform prior; Laplace smoothing with one extra slot for unseen grams.
    std::vector<double> log_scores(classes_.size(), 0.0);
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        const double denom =
            static_cast<double>(total_grams_[c]) + static_cast<double>(distinct_grams_) + 1.0;
        for (const std::string& gram : grams) {
            const auto hit = gram_counts_[c].find(gram);
            const double count = hit != gram_counts_[c].end() ? static_cast<double>(hit->second) : 0.0;
            log_scores[c] += std::log((count + 1.0) / denom);
        }
    }
    const double max_log = *std::max_element(log_scores.begin(), log_scores.end());
    double sum = 0.0;
    for (double& s : log_scores) {
        s = std::exp(s - max_log);
        sum += s;
    }
    std::map<std::string, double> posterior;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        posterior[classes_[c]] = log_scores[c] / sum;
    }
    return posterior;
}

LangIdPrediction LangIdModel::classify(const std::string& text) const {
    const auto posterior = posteriors(text);
    LangIdPrediction best;
    for (const auto& [lang, p] : posterior) {
        if (p > best.confidence) {
            best.lang = lang;
            best.confidence = p;
        }
    }
    return best;
}

double LangIdModel::confidence_for(const std::string& text, const std::string& lang) const {
    const auto posterior = posteriors(text);
    const auto hit = posterior.find(lang);
    return hit != posterior.end() ? hit->second : 0.0;
}

void LangIdModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw std::runtime_error("cannot open langid file for writing: " + path);
    }
    out << "textsift-langid 1\n";
    out << "order\t" << order_ << "\n";
    out << "distinct\t" << distinct_grams_ << "\n";
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        for (const auto& [gram, count] : gram_counts_[c]) {
            out << classes_[c] << '\t' << gram << '\t' << count << '\n';
        }
    }
}

LangIdModel LangIdModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open langid file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != "textsift-langid 1") {
        throw std::runtime_error("unrecognized langid file header: " + path);
    }
    LangIdModel model;
    std::map<std::string, std::size_t> class_index;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const std::size_t t1 = line.find('\t');
        const std::size_t t2 = line.rfind('\t');
        if (t1 == std::string::npos) {
            throw std::runtime_error("malformed langid file line: " + line);
        }
        const std::string key = line.substr(0, t1);
        if (key == "order") {
            model.order_ = std::stoul(line.substr(t1 + 1));
            continue;
        }
        if (key == "distinct") {
            model.distinct_grams_ = std::stoull(line.substr(t1 + 1));
            continue;
        }
        if (t2 == t1) {
            throw std::runtime_error("malformed langid file line: " + line);
        }
        auto [it, inserted] = class_index.try_emplace(key, model.classes_.size());
        if (inserted) {
            model.classes_.push_back(key);
            model.gram_counts_.emplace_back();
            model.total_grams_.push_back(0);
        }
        const std::uint64_t count = std::stoull(line.substr(t2 + 1));
        model.gram_counts_[it->second][line.substr(t1 + 1, t2 - t1 - 1)] = count;
        model.total_grams_[it->second] += count;
    }
    if (model.classes_.size() < 2) {
        throw std::runtime_error("langid file has fewer than 2 classes: " + path);
    }
    return model;
}

}  // namespace sift
