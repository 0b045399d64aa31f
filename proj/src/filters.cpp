#include "textsift/filters.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "textsift/utf8.hpp"

namespace sift {

namespace {

std::string fold(std::string_view word) {
    std::string out(word);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c += 'a' - 'A';
        }
    }
    return out;
}

}  // namespace

bool Lexicon::matches(const std::string& word) const {
    const std::string folded = fold(word);
    if (words.count(folded)) {
        return true;
    }
    for (const std::string& piece : pieces) {
        if (folded.find(piece) != std::string::npos) {
            return true;
        }
    }
    return false;
}

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open lexicon file: " + path);
    }
    Lexicon lex;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.rfind("piece:", 0) == 0) {
            lex.pieces.push_back(fold(line.substr(6)));
        } else {
            lex.words.insert(fold(line));
        }
    }
    return lex;
}

void FilterConfig::validate() const {
    if (min_length && max_length && (*min_length == 0 || *min_length > *max_length)) {
        throw std::invalid_argument("filter config: need 0 < min_length <= max_length");
    }
    const auto check_ratio = [](const std::optional<double>& v, const char* name) {
        if (v && (*v < 0.0 || *v > 1.0)) {
            throw std::invalid_argument(std::string("filter config: ") + name +
                                        " must be in [0,1]");
        }
    };
    check_ratio(char_rep_threshold, "char_rep_threshold");
    check_ratio(word_rep_threshold, "word_rep_threshold");
    check_ratio(special_threshold, "special_threshold");
    check_ratio(stopword_threshold, "stopword_threshold");
    check_ratio(flagged_threshold, "flagged_threshold");
    check_ratio(langid_threshold, "langid_threshold");
    if (char_rep_ngram < 1 || word_rep_ngram < 1) {
        throw std::invalid_argument("filter config: repetition ngram n must be >= 1");
    }
    if (ppl_threshold && *ppl_threshold <= 0.0) {
        throw std::invalid_argument("filter config: ppl_threshold must be positive");
    }
}

double char_repetition_ratio(const std::string& text, std::size_t n) {
    const std::vector<char32_t> cps = utf8::decode_all(text);
    if (cps.size() < n) {
        return 0.0;
    }
    std::unordered_map<std::string, std::uint64_t> counts;
    const std::uint64_t total = cps.size() - n + 1;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        std::string gram;
        for (std::size_t j = 0; j < n; ++j) {
            utf8::encode(cps[i + j], gram);
        }
        ++counts[gram];
    }
    const std::size_t m =
        static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(counts.size()))));
    std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    std::uint64_t top_sum = 0;
    for (std::size_t i = 0; i < m && i < ranked.size(); ++i) {
        top_sum += ranked[i].second;
    }
    return static_cast<double>(top_sum) / static_cast<double>(total);
}

double word_repetition_ratio(const std::vector<std::string>& words, std::size_t n) {
    if (words.size() < n) {
        return 0.0;
    }
    std::unordered_map<std::string, std::uint64_t> counts;
    const std::uint64_t total = words.size() - n + 1;
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
        std::string gram;
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                gram.push_back(' ');
            }
            gram += words[i + j];
        }
        ++counts[gram];
    }
    std::uint64_t repeated = 0;
    for (const auto& [gram, count] : counts) {
        if (count > 2) {
            repeated += count;
        }
    }
    return static_cast<double>(repeated) / static_cast<double>(total);
}

double special_char_ratio(const std::string& text, const std::set<char32_t>& charset) {
    std::uint64_t total = 0;
    std::uint64_t special = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = utf8::decode(text, pos);
        ++total;
        if (charset.count(cp)) {
            ++special;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(special) / static_cast<double>(total);
}

double lexicon_ratio(const std::vector<std::string>& words, const Lexicon& lexicon) {
    if (words.empty() || lexicon.empty()) {
        return 0.0;
    }
    std::uint64_t matched = 0;
    for (const std::string& word : words) {
        if (lexicon.matches(word)) {
            ++matched;
        }
    }
    return static_cast<double>(matched) / static_cast<double>(words.size());
}

const std::vector<std::string> kFilterOrder = {
    "word_count",   "char_repetition", "word_repetition", "special_char",
    "stopword",     "flagged",         "langid",          "perplexity",
};

FilterVerdict apply_filters(const Document& doc, const FilterConfig& config,
                            const FilterScorers& scorers, const SegmenterConfig& segmenter) {
    config.validate();
    FilterVerdict verdict;
    const std::vector<std::string> words = segment_words(doc.text, doc.lang, segmenter);

    const auto fail = [&](const std::string& name) {
        if (verdict.kept) {
            verdict.kept = false;
            verdict.failed_filter = name;
        }
    };

    // 1. word count
    if (config.min_length || config.max_length) {
        const double count = static_cast<double>(words.size());
        verdict.scores["word_count"] = count;
        if ((config.min_length && words.size() < *config.min_length) ||
            (config.max_length && words.size() > *config.max_length)) {
            fail("word_count");
        }
    }
    // 2. character repetition
    if (config.char_rep_threshold) {
        const double ratio = char_repetition_ratio(doc.text, config.char_rep_ngram);
        verdict.scores["char_repetition"] = ratio;
        if (ratio > *config.char_rep_threshold) {
            fail("char_repetition");
        }
    }
    // 3. word repetition
    if (config.word_rep_threshold) {
        const double ratio = word_repetition_ratio(words, config.word_rep_ngram);
        verdict.scores["word_repetition"] = ratio;
        if (ratio > *config.word_rep_threshold) {
            fail("word_repetition");
        }
    }
    // 4. special characters
    if (config.special_threshold) {
        const double ratio = special_char_ratio(doc.text, config.special_charset);
        verdict.scores["special_char"] = ratio;
        if (ratio > *config.special_threshold) {
            fail("special_char");
        }
    }
    // 5. stop words (direction configurable; default removes above)
    if (config.stopword_threshold) {
        const double ratio = lexicon_ratio(words, config.stopwords);
        verdict.scores["stopword"] = ratio;
        const bool violates = config.stopword_direction == ThresholdDirection::FailAbove
                                  ? ratio > *config.stopword_threshold
                                  : ratio < *config.stopword_threshold;
        if (violates) {
            fail("stopword");
        }
    }
    // 6. flagged words
    if (config.flagged_threshold) {
        const double ratio = lexicon_ratio(words, config.flagged);
        verdict.scores["flagged"] = ratio;
        if (ratio > *config.flagged_threshold) {
            fail("flagged");
        }
    }
    // 7. language identification confidence
    if (config.langid_threshold) {
        double confidence = -1.0;
        if (scorers.use_sidecar && doc.meta.count("langid_conf")) {
            const auto lang_it = doc.meta.find("langid_lang");
            const std::string sidecar_lang =
                lang_it != doc.meta.end() ? lang_it->second : doc.lang;
            const double conf = std::stod(doc.meta.at("langid_conf"));
            confidence = sidecar_lang == doc.lang ? conf : 0.0;
        } else if (scorers.langid != nullptr) {
            confidence = scorers.langid->confidence_for(doc.text, doc.lang);
        } else {
            throw std::runtime_error(
                "langid filter enabled but no model and no sidecar score for doc " + doc.id);
        }
        verdict.scores["langid"] = confidence;
        if (confidence < *config.langid_threshold) {
            fail("langid");
        }
    }
    // 8. perplexity
    if (config.ppl_threshold) {
        double ppl = -1.0;
        if (scorers.use_sidecar && doc.meta.count("ppl")) {
            ppl = std::stod(doc.meta.at("ppl"));
        } else if (scorers.lm != nullptr) {
            ppl = scorers.lm->perplexity(words);
        } else {
            throw std::runtime_error(
                "perplexity filter enabled but no model and no sidecar score for doc " + doc.id);
        }
        verdict.scores["perplexity"] = ppl;
        if (ppl > *config.ppl_threshold) {
            fail("perplexity");
        }
    }
    return verdict;
}

}  // namespace sift
