#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sift {

struct SegmentationOptions {
    double dropout_p = 0.0;  // probability of skipping each merge application
    std::uint64_t seed = 0;
};

// Byte-level BPE model: 256 single-byte base tokens plus an ordered merge
// list. Any UTF-8 input is representable, so segmentation never fails on
// unfamiliar scripts.
class BpeModel {
  public:
    using TokenId = std::uint32_t;
    static constexpr std::size_t kByteAlphabet = 256;

    BpeModel();

    // Greedy most-frequent-pair training until `vocab_size` tokens exist or
    // no pair repeats. Ties break lexicographically, so retraining is
    // deterministic.
    static BpeModel train(const std::vector<std::string>& corpus, std::size_t vocab_size);

    // Applies merges in rank order; with dropout_p > 0 each individual
    // application is independently skipped. dropout_p = 0 reproduces
    // canonical greedy BPE.
    std::vector<TokenId> segment(const std::string& text,
                                 const SegmentationOptions& options = {}) const;

    // Concatenation of token strings; exact inverse of segment for every
    // dropout value. Throws std::out_of_range for unknown ids.
    std::string detokenize(const std::vector<TokenId>& tokens) const;

    const std::string& token_string(TokenId id) const;
    std::size_t vocab_size() const { return vocab_.size(); }
    std::size_t num_merges() const { return merges_.size(); }

    // Stable fingerprint of the merge table, recorded in packed outputs.
    std::uint64_t fingerprint() const;

    // Interchange files: merges one "left right" pair per line (rank =
    // line order), vocabulary one "token<TAB>id" per line. Non-printable
    // bytes, spaces and backslashes are \xNN-escaped.
    void save(const std::string& merges_path, const std::string& vocab_path) const;
    static BpeModel load(const std::string& merges_path, const std::string& vocab_path);

  private:
    struct Merge {
        TokenId left;
        TokenId right;
        TokenId result;
    };

    std::vector<std::string> vocab_;                 // id -> byte string
    std::map<std::string, TokenId> token_ids_;       // byte string -> id
    std::vector<Merge> merges_;                      // rank order

    TokenId intern(const std::string& token);

    // Splits text into pretokens; a run of spaces attaches to the following
    // word, so "␣word" merges as one unit. Merges never cross pretokens.
    static std::vector<std::string> pretokenize(const std::string& text);

    void apply_merges(std::vector<TokenId>& symbols, double dropout_p, class Rng* rng) const;
};

}  // namespace sift
