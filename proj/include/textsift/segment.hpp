#pragma once

#include <set>
#include <string>
#include <vector>

namespace sift {

// Word segmentation shared by the filters, dedup shingling and packing.
// Space-delimited languages split on whitespace; scripts without word
// boundaries fall back to fixed-size character chunks.
struct SegmenterConfig {
    std::set<std::string> char_chunk_langs = {"th", "lo", "zh", "km", "my", "ja"};
    std::size_t chunk_size = 4;  // codepoints per chunk in fallback mode
};

std::vector<std::string> split_whitespace(const std::string& text);
std::vector<std::string> split_char_chunks(const std::string& text, std::size_t chunk_size);

std::vector<std::string> segment_words(const std::string& text, const std::string& lang,
                                       const SegmenterConfig& config);

std::size_t word_count(const std::string& text, const std::string& lang,
                       const SegmenterConfig& config);

}  // namespace sift
