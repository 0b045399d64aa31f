#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "textsift/document.hpp"
#include "textsift/langid.hpp"
#include "textsift/ngram_lm.hpp"
#include "textsift/segment.hpp"

namespace sift {

// Lexicon with word-level entries (whole-word match) and byte-piece-level
// entries (substring match), both case-folded. File format: one entry per
// line, "piece:" prefix marks a piece entry.
struct Lexicon {
    std::set<std::string> words;
    std::vector<std::string> pieces;

    bool empty() const { return words.empty() && pieces.empty(); }
    bool matches(const std::string& word) const;

    static Lexicon load(const std::string& path);
};

enum class ThresholdDirection { FailAbove, FailBelow };

// Per-language thresholds for the eight quality filters. A filter with an
// unset threshold is disabled and does not contribute a score.
struct FilterConfig {
    std::string lang;
    std::optional<std::uint64_t> min_length;
    std::optional<std::uint64_t> max_length;
    std::size_t char_rep_ngram = 10;
    std::optional<double> char_rep_threshold;
    std::size_t word_rep_ngram = 5;
    std::optional<double> word_rep_threshold;
    std::set<char32_t> special_charset;
    std::optional<double> special_threshold;
    Lexicon stopwords;
    std::optional<double> stopword_threshold;
    ThresholdDirection stopword_direction = ThresholdDirection::FailAbove;
    Lexicon flagged;
    std::optional<double> flagged_threshold;
    std::optional<double> langid_threshold;
    std::optional<double> ppl_threshold;

    void validate() const;  // throws std::invalid_argument
};

struct FilterVerdict {
    bool kept = true;
    std::optional<std::string> failed_filter;  // first failure in fixed order
    std::map<std::string, double> scores;      // every evaluated filter
};

// Scorers resolved for a document's language. Sidecar scores in doc.meta
// ("langid_lang"/"langid_conf", "ppl") take precedence over the models.
struct FilterScorers {
    const LangIdModel* langid = nullptr;
    const NgramLanguageModel* lm = nullptr;
    bool use_sidecar = true;
};

// Sum of the frequencies of the top-m most frequent character n-grams,
// with m = floor(sqrt(#distinct n-grams)). Texts shorter than n chars
// score 0.
double char_repetition_ratio(const std::string& text, std::size_t n);

// Sum of the frequencies of all word n-grams occurring more than twice.
double word_repetition_ratio(const std::vector<std::string>& words, std::size_t n);

double special_char_ratio(const std::string& text, const std::set<char32_t>& charset);

double lexicon_ratio(const std::vector<std::string>& words, const Lexicon& lexicon);

// Fixed filter order; also the score-map keys.
extern const std::vector<std::string> kFilterOrder;

FilterVerdict apply_filters(const Document& doc, const FilterConfig& config,
                            const FilterScorers& scorers,
                            const SegmenterConfig& segmenter = {});

}  // namespace sift
