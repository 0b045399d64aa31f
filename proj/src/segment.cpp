#include "textsift/segment.hpp"

#include "textsift/utf8.hpp"

namespace sift {

std::vector<std::string> split_whitespace(const std::string& text) {
    std::vector<std::string> words;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\t' ||
                                     text[pos] == '\r')) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\n' && text[pos] != '\t' &&
               text[pos] != '\r') {
            ++pos;
        }
        if (pos > start) {
            words.emplace_back(text, start, pos - start);
        }
    }
    return words;
}

std::vector<std::string> split_char_chunks(const std::string& text, std::size_t chunk_size) {
    std::vector<std::string> chunks;
    if (chunk_size == 0) {
        chunk_size = 1;
    }
    std::string current;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = pos;
        const char32_t cp = utf8::decode(text, pos);
        if (cp == U' ' || cp == U'\n' || cp == U'\t' || cp == U'\r') {
            if (!current.empty()) {
                chunks.push_back(std::move(current));
                current.clear();
                count = 0;
            }
            continue;
        }
        current.append(text, start, pos - start);
        if (++count == chunk_size) {
            chunks.push_back(std::move(current));
            current.clear();
            count = 0;
        }
    }
    if (!current.empty()) {
        chunks.push_back(std::move(current));
    }
    return chunks;
}

std::vector<std::string> segment_words(const std::string& text, const std::string& lang,
                                       const SegmenterConfig& config) {
    if (config.char_chunk_langs.count(lang)) {
        return split_char_chunks(text, config.chunk_size);
    }
    return split_whitespace(text);
}

std::size_t word_count(const std::string& text, const std::string& lang,
                       const SegmenterConfig& config) {
    return segment_words(text, lang, config).size();
}

}  // namespace sift
