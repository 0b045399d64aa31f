#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "textsift/bpe.hpp"
#include "textsift/document.hpp"

namespace sift {

enum class PackMode { Codeswitch, Monolingual };

struct PackConfig {
    std::size_t window = 4096;        // tokens per training sequence
    std::size_t merge_target = 256;   // word count that closes a merged example
    std::size_t merge_max_span = 8;   // max adjacent examples merged
    double cs_rate = 0.10;            // word-level replacement probability
    PackMode mode = PackMode::Codeswitch;
    std::int64_t marker_id = -1;      // end-of-document marker; -1 = one past vocab
    double dropout_p = 0.0;           // BPE dropout while packing
    std::uint64_t seed = 0;
};

// word -> replacement phrase for one language pair; keys case-folded.
// File format: "source<TAB>phrase" per line.
struct BilingualLexicon {
    std::map<std::string, std::string> entries;

    static BilingualLexicon load(const std::string& path);
};

// Merges consecutive paragraphs into one document until the accumulated
// word count reaches merge_target or the span reaches a per-group uniform
// draw in [1, merge_max_span]. Paragraph order and content are preserved;
// merged text joins with newlines. Groups never cross (lang, source)
// boundaries.
std::vector<Document> merge_adjacent(const std::vector<Document>& paragraphs,
                                     const PackConfig& config);

// Deterministic core used by merge_adjacent; spans supplied explicitly.
std::vector<Document> merge_with_spans(const std::vector<Document>& paragraphs,
                                       const std::vector<std::size_t>& spans,
                                       std::size_t merge_target);

// Replaces each lexicon-covered word with probability cs_rate; returns the
// number of replacements.
std::size_t word_code_switch(Document& doc, const BilingualLexicon& lexicon, double cs_rate,
                             std::uint64_t seed);

struct PackedWindow {
    std::vector<std::uint32_t> ids;
    bool final_partial = false;           // trailing window shorter than `window`
    std::set<std::string> langs;          // languages contributing tokens
};

struct PackedStream {
    std::string lang;  // "*" for the code-switched multilingual stream
    std::vector<PackedWindow> windows;
};

struct PackResult {
    std::vector<PackedStream> streams;
    std::size_t window = 0;
    std::uint32_t marker_id = 0;
    std::uint64_t tokenizer_fingerprint = 0;
    std::uint64_t total_tokens = 0;  // including markers
};

// Tokenizes documents, joins them with the end-of-document marker and
// chunks each stream into windows of exactly config.window tokens (the
// final partial window is flagged). Codeswitch mode shuffles all languages
// into one stream; monolingual mode packs each language separately.
PackResult pack_sequences(const std::vector<Document>& docs, const BpeModel& model,
                          const PackConfig& config);

// Window file: one JSON header line, then one JSON record per window.
void write_windows(const PackResult& result, const std::string& path);
PackResult read_windows(const std::string& path);

// Splits window ids at markers and detokenizes; the pack-level inverse.
std::vector<std::string> unpack_documents(const PackResult& result, const BpeModel& model);

}  // namespace sift
