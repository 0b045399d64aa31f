#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sift {

struct LangIdPrediction {
    std::string lang;
    double confidence = 0.0;  // posterior of the predicted class
};

// Character n-gram naive-Bayes language classifier, the built-in stand-in
// for an external language-id scorer. Posteriors over the trained classes
// sum to 1.
class LangIdModel {
  public:
    LangIdModel() = default;

    static LangIdModel train(const std::map<std::string, std::vector<std::string>>& corpus_by_lang,
                             std::size_t order = 2);

    LangIdPrediction classify(const std::string& text) const;
    // Posterior assigned to one specific class.
    double confidence_for(const std::string& text, const std::string& lang) const;
    std::map<std::string, double> posteriors(const std::string& text) const;

    std::size_t num_classes() const { return classes_.size(); }
    const std::vector<std::string>& classes() const { return classes_; }

    void save(const std::string& path) const;
    static LangIdModel load(const std::string& path);

  private:
    std::size_t order_ = 2;
    std::vector<std::string> classes_;
    std::vector<std::map<std::string, std::uint64_t>> gram_counts_;  // per class
    std::vector<std::uint64_t> total_grams_;                         // per class
    std::uint64_t distinct_grams_ = 0;                               // union over classes

    std::vector<std::string> extract_grams(const std::string& text) const;
};

}  // namespace sift
