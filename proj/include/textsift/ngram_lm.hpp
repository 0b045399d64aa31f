#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sift {

// Backoff-smoothed word n-gram model, the built-in stand-in for an external
// perplexity scorer. Scores are proper (<= 1) so perplexity is always >= 1,
// and unknown words fall into a reserved class so any text gets a finite
// positive score.
class NgramLanguageModel {
  public:
    NgramLanguageModel() = default;

    static NgramLanguageModel train(const std::vector<std::vector<std::string>>& corpus,
                                    std::size_t order);
    // Convenience: one whitespace-tokenized sequence per line.
    static NgramLanguageModel train_from_lines(const std::vector<std::string>& lines,
                                               std::size_t order);

    // exp of mean per-word negative log-likelihood; 1.0 for empty input.
    double perplexity(const std::vector<std::string>& words) const;
    double perplexity_text(const std::string& text) const;

    // P(word | context), backed off with factor 0.4 per dropped word.
    double score(const std::vector<std::string>& context, const std::string& word) const;

    std::size_t order() const { return order_; }
    std::size_t vocab_size() const { return vocab_size_; }

    void save(const std::string& path) const;
    static NgramLanguageModel load(const std::string& path);

  private:
    std::size_t order_ = 0;
    std::size_t vocab_size_ = 0;
    std::uint64_t total_unigrams_ = 0;
    // counts_[k] maps a space-joined (k+1)-gram to its count.
    std::vector<std::map<std::string, std::uint64_t>> counts_;

    static std::string join(const std::vector<std::string>& words, std::size_t begin,
                            std::size_t end);
};

}  // namespace sift
