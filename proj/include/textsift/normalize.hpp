#pragma once

#include <map>
#include <set>
#include <string>

#include "textsift/document.hpp"

namespace sift {

struct NormalizeConfig {
    std::size_t word_length_cutoff = 1000;  // characters, not bytes
    std::set<std::string> blocklist;
    // Unicode punctuation codepoint -> ASCII replacement. Empty means use
    // the built-in table.
    std::map<char32_t, std::string> punct_map;
    bool strip_html = true;
    bool strip_emoji = true;
    bool fix_escapes = true;
};

// Maps every Unicode whitespace character except newline to U+0020.
// Runs are not collapsed; newlines delimit paragraphs for later stages.
std::string uniform_whitespace(const std::string& text);

std::string replace_unicode_punct(const std::string& text);
std::string replace_unicode_punct(const std::string& text,
                                  const std::map<char32_t, std::string>& punct_map);

// Removes emoji codepoints, HTML-tag substrings and blocklisted words.
// Spacing around a removal site collapses to a single space.
std::string strip_incorrect_words(const std::string& text, const NormalizeConfig& config);

// Deletes whitespace-delimited tokens longer than `cutoff` codepoints.
std::string remove_lengthy_words(const std::string& text, std::size_t cutoff);

// Repairs over-escaped newline formatting: literal "\n" escapes become real
// newlines, then paragraphs that look like sentences (contain ". ") get a
// blank line between them while consecutive short fragments stay adjacent.
std::string fix_escapes(const std::string& text);

// The two halves of fix_escapes, split so the document-level pipeline can
// convert escapes before the other passes and re-join newlines after them
// (keeps the whole composition idempotent).
std::string convert_newline_escapes(const std::string& text);
std::string rejoin_paragraphs(const std::string& text);

std::map<char32_t, std::string> default_punct_map();
bool is_emoji_codepoint(char32_t cp);

// Full normalization pass; returns true if the text changed.
bool normalize_document(Document& doc, const NormalizeConfig& config);
std::string normalize_text(const std::string& text, const NormalizeConfig& config);

// Resource loaders: one entry per line. punct map lines are
// "<utf8 char><TAB><ascii replacement>".
std::set<std::string> load_blocklist(const std::string& path);
std::map<char32_t, std::string> load_punct_map(const std::string& path);

}  // namespace sift
