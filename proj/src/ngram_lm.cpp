#include "textsift/ngram_lm.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "textsift/segment.hpp"

namespace sift {

namespace {
constexpr double kBackoff = 0.4;
}

std::string NgramLanguageModel::join(const std::vector<std::string>& words, std::size_t begin,
                                     std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) {
            out.push_back(' ');
        }
        out += words[i];
    }
    return out;
}

NgramLanguageModel NgramLanguageModel::train(const std::vector<std::vector<std::string>>& corpus,
                                             std::size_t order) {
    if (order < 1) {
        throw std::invalid_argument("ngram order must be >= 1");
    }
    NgramLanguageModel lm;
    lm.order_ = order;
    lm.counts_.assign(order, {});
    bool any = false;
    for (const auto& sequence : corpus) {
        for (std::size_t i = 0; i < sequence.size(); ++i) {
            any = true;
            for (std::size_t k = 0; k < order && i + k < sequence.size(); ++k) {
                ++lm.counts_[k][join(sequence, i, i + k + 1)];
            }
        }
        lm.total_unigrams_ += sequence.size();
    }
    if (!any) {
        throw std::invalid_argument("cannot train ngram model on an empty corpus");
    }
    lm.vocab_size_ = lm.counts_[0].size();
    return lm;
}

NgramLanguageModel NgramLanguageModel::train_from_lines(const std::vector<std::string>& lines,
                                                        std::size_t order) {
    std::vector<std::vector<std::string>> corpus;
    corpus.reserve(lines.size());
    for (const std::string& line : lines) {
        corpus.push_back(split_whitespace(line));
    }
    return train(corpus, order);
}

double NgramLanguageModel::score(const std::vector<std::string>& context,
                                 const std::string& word) const {
    if (order_ == 0) {
        throw std::logic_error("ngram model is not trained");
    }
    // Highest usable order first, multiplying in the backoff penalty for
    // every context word dropped.
    const std::size_t usable = std::min(context.size(), order_ - 1);
    double penalty = 1.0;
    for (std::size_t ctx_len = usable; ctx_len > 0; --ctx_len) {
        std::vector<std::string> gram(context.end() - ctx_len, context.end());
        gram.push_back(word);
        const auto hit = counts_[ctx_len].find(join(gram, 0, gram.size()));
        if (hit != counts_[ctx_len].end()) {
            const auto ctx_hit = counts_[ctx_len - 1].find(join(gram, 0, gram.size() - 1));
            const double denom = static_cast<double>(ctx_hit->second);
            return penalty * static_cast<double>(hit->second) / denom;
        }
        penalty *= kBackoff;
    }
    // Unigram base case with one reserved unknown slot.
    const auto hit = counts_[0].find(word);
    const double denom = static_cast<double>(total_unigrams_) + 1.0;
    const double p = hit != counts_[0].end() ? static_cast<double>(hit->second) / denom
                                             : 1.0 / denom;
    return penalty * p;
}

double NgramLanguageModel::perplexity(const std::vector<std::string>& words) const {
    if (words.empty()) {
        return 1.0;  // no evidence
    }
    double nll = 0.0;
    std::vector<std::string> context;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const std::size_t begin = i >= order_ - 1 ? i - (order_ - 1) : 0;
        context.assign(words.begin() + begin, words.begin() + i);
        nll -= std::log(score(context, words[i]));
    }
    return std::exp(nll / static_cast<double>(words.size()));
}

double NgramLanguageModel::perplexity_text(const std::string& text) const {
    return perplexity(split_whitespace(text));
}

void NgramLanguageModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw std::runtime_error("cannot open lm file for writing: " + path);
    }
    out << "textsift-lm 1\n";
    out << "order\t" << order_ << "\n";
    out << "total\t" << total_unigrams_ << "\n";
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        for (const auto& [gram, count] : counts_[k]) {
            out << (k + 1) << '\t' << gram << '\t' << count << '\n';
        }
    }
}

NgramLanguageModel NgramLanguageModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open lm file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != "textsift-lm 1") {
        throw std::runtime_error("unrecognized lm file header: " + path);
    }
    NgramLanguageModel lm;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const std::size_t t1 = line.find('\t');
        if (t1 == std::string::npos) {
            throw std::runtime_error("malformed lm file line: " + line);
        }
        const std::string key = line.substr(0, t1);
        if (key == "order") {
            lm.order_ = std::stoul(line.substr(t1 + 1));
            lm.counts_.assign(lm.order_, {});
            continue;
        }
        if (key == "total") {
            lm.total_unigrams_ = std::stoull(line.substr(t1 + 1));
            continue;
        }
        const std::size_t t2 = line.rfind('\t');
        if (t2 == t1 || lm.counts_.empty()) {
            throw std::runtime_error("malformed lm file line: " + line);
        }
        const std::size_t k = std::stoul(key);
        if (k < 1 || k > lm.counts_.size()) {
            throw std::runtime_error("lm file gram order out of range: " + line);
        }
        lm.counts_[k - 1][line.substr(t1 + 1, t2 - t1 - 1)] = std::stoull(line.substr(t2 + 1));
    }
    if (lm.order_ == 0 || lm.counts_[0].empty()) {
        throw std::runtime_error("lm file has no unigrams: " + path);
    }
    lm.vocab_size_ = lm.counts_[0].size();
    return lm;
}

}  // namespace sift
