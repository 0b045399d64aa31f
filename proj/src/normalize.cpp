#include "textsift/normalize.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

#include "textsift/utf8.hpp"

namespace sift {

namespace {

bool is_space_codepoint(char32_t cp) {
    switch (cp) {
        case 0x09:
        case 0x0B:
        case 0x0C:
        case 0x0D:
        case 0x20:
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

}  // namespace

bool is_emoji_codepoint(char32_t cp) {
    return (cp >= 0x1F300 && cp <= 0x1F5FF) ||  // pictographs
           (cp >= 0x1F600 && cp <= 0x1F64F) ||  // emoticons
           (cp >= 0x1F680 && cp <= 0x1F6FF) ||  // transport
           (cp >= 0x1F900 && cp <= 0x1F9FF) ||  // supplemental symbols
           (cp >= 0x1FA00 && cp <= 0x1FAFF) ||
           (cp >= 0x2600 && cp <= 0x26FF) ||    // misc symbols
           (cp >= 0x2700 && cp <= 0x27BF) ||    // dingbats
           (cp >= 0x1F1E6 && cp <= 0x1F1FF) ||  // regional indicators
           cp == 0xFE0E || cp == 0xFE0F;        // variation selectors
}

std::map<char32_t, std::string> default_punct_map() {
    // Fullwidth/typographic punctuation to its ASCII equivalent.
    return {
        {U'，', ","},  {U'。', "."},  {U'、', ","},  {U'”', "\""}, {U'“', "\""},
        {U'‘', "'"},   {U'’', "'"},   {U'∶', ":"},   {U'：', ":"},  {U'？', "?"},
        {U'《', "\""}, {U'》', "\""}, {U'）', ")"},  {U'！', "!"},  {U'（', "("},
        {U'；', ";"},  {U'「', "\""}, {U'」', "\""}, {U'～', "~"},  {U'…', "..."},
        {U'━', "-"},   {U'—', "-"},   {U'–', "-"},   {U'〈', "<"},  {U'〉', ">"},
        {U'【', "["},  {U'】', "]"},  {U'％', "%"},  {U'．', "."},  {U'０', "0"},
        {U'１', "1"},  {U'２', "2"},  {U'３', "3"},  {U'４', "4"},  {U'５', "5"},
        {U'６', "6"},  {U'７', "7"},  {U'８', "8"},  {U'９', "9"},
    };
}

std::string uniform_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = pos;
        const char32_t cp = utf8::decode(text, pos);
        if (cp != U'\n' && is_space_codepoint(cp)) {
            out.push_back(' ');
        } else {
            out.append(text, start, pos - start);
        }
    }
    return out;
}

std::string replace_unicode_punct(const std::string& text,
                                  const std::map<char32_t, std::string>& punct_map) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = pos;
        const char32_t cp = utf8::decode(text, pos);
        auto it = punct_map.find(cp);
        if (it != punct_map.end()) {
            out.append(it->second);
        } else {
            out.append(text, start, pos - start);
        }
    }
    return out;
}

std::string replace_unicode_punct(const std::string& text) {
    static const std::map<char32_t, std::string> table = default_punct_map();
    return replace_unicode_punct(text, table);
}

namespace {

// True if text at `pos` starts an HTML tag: "<" followed by a letter, "/"
// or "!", closed by ">" on the same line within a sane length. Returns the
// position one past ">" in `end`.
bool match_html_tag(const std::string& text, std::size_t pos, std::size_t& end) {
    if (pos + 1 >= text.size() || text[pos] != '<') {
        return false;
    }
    const char c = text[pos + 1];
    const bool opener = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '/' || c == '!';
    if (!opener) {
        return false;
    }
    const std::size_t limit = std::min(text.size(), pos + 256);
    for (std::size_t i = pos + 1; i < limit; ++i) {
        if (text[i] == '\n') {
            return false;
        }
        if (text[i] == '>') {
            end = i + 1;
            return true;
        }
    }
    return false;
}

// Emits the text with [spans to remove] deleted, collapsing the spacing
// around each removal site to a single space. The caller supplies a
// predicate deciding, at each position, the length of a span to drop
// (0 = keep this character).
template <typename SpanFn>
std::string remove_spans(const std::string& text, SpanFn span_at) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t span = span_at(pos);
        if (span == 0) {
            const std::size_t start = pos;
            utf8::decode(text, pos);
            out.append(text, start, pos - start);
            continue;
        }
        const bool left_space = !out.empty() && out.back() == ' ';
        std::size_t next = pos + span;
        // Swallow any further removable spans separated only by spaces, so
        // "a <x> <y> b" collapses to one site.
        bool right_space = false;
        while (next < text.size()) {
            if (text[next] == ' ') {
                right_space = true;
                ++next;
                continue;
            }
            const std::size_t more = span_at(next);
            if (more > 0) {
                next += more;
                continue;
            }
            break;
        }
        pos = next;
        if (left_space || right_space) {
            while (!out.empty() && out.back() == ' ') {
                out.pop_back();
            }
            const bool at_edge = out.empty() || out.back() == '\n' || pos >= text.size() ||
                                 text[pos] == '\n';
            if (!at_edge) {
                out.push_back(' ');
            }
        }
    }
    return out;
}

std::string ascii_fold(std::string_view word) {
    std::string out(word);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c += 'a' - 'A';
        }
    }
    return out;
}

}  // namespace

std::string strip_incorrect_words(const std::string& text, const NormalizeConfig& config) {
    // Pass 1: character-level removals (tags, emoji).
    std::string result = remove_spans(text, [&](std::size_t pos) -> std::size_t {
        if (config.strip_html && text[pos] == '<') {
            std::size_t end = 0;
            if (match_html_tag(text, pos, end)) {
                return end - pos;
            }
        }
        if (config.strip_emoji) {
            std::size_t p = pos;
            const char32_t cp = utf8::decode(text, p);
            if (is_emoji_codepoint(cp)) {
                return p - pos;
            }
        }
        return 0;
    });

    // Pass 2: whole-word blocklist removal.
    if (!config.blocklist.empty()) {
        const std::string& src = result;
        result = remove_spans(src, [&](std::size_t pos) -> std::size_t {
            const bool at_word_start =
                pos == 0 || src[pos - 1] == ' ' || src[pos - 1] == '\n';
            if (!at_word_start || src[pos] == ' ' || src[pos] == '\n') {
                return 0;
            }
            std::size_t end = pos;
            while (end < src.size() && src[end] != ' ' && src[end] != '\n') {
                ++end;
            }
            const std::string folded = ascii_fold(std::string_view(src).substr(pos, end - pos));
            return config.blocklist.count(folded) ? end - pos : 0;
        });
    }
    return result;
}

std::string remove_lengthy_words(const std::string& text, std::size_t cutoff) {
    std::string out;
    out.reserve(text.size());
    std::string gap;      // whitespace accumulated since the last kept token
    bool deleted_in_gap = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        // Collect one whitespace run.
        const std::size_t ws_start = pos;
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n')) {
            ++pos;
        }
        gap.append(text, ws_start, pos - ws_start);
        if (pos >= text.size()) {
            break;
        }
        // Collect one token.
        const std::size_t tok_start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\n') {
            ++pos;
        }
        const std::string_view token = std::string_view(text).substr(tok_start, pos - tok_start);
        if (utf8::length(token) > cutoff) {
            deleted_in_gap = true;
            continue;
        }
        if (!deleted_in_gap) {
            out += gap;
        } else if (!out.empty()) {
            // Keep paragraph boundaries that crossed the gap, else a space.
            std::string newlines;
            for (char c : gap) {
                if (c == '\n') {
                    newlines.push_back('\n');
                }
            }
            out += newlines.empty() ? " " : newlines;
        }
        out.append(token);
        gap.clear();
        deleted_in_gap = false;
    }
    if (!deleted_in_gap) {
        out += gap;  // preserve original trailing whitespace
    }
    return out;
}

std::string convert_newline_escapes(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] == '\\' && pos + 1 < text.size() && text[pos + 1] == 'n') {
            out.push_back('\n');
            pos += 2;
        } else {
            out.push_back(text[pos]);
            ++pos;
        }
    }
    return out;
}

std::string rejoin_paragraphs(const std::string& text) {
    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == '\n') {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != '\n') {
            ++pos;
        }
        if (pos > start) {
            segments.emplace_back(text, start, pos - start);
        }
    }
    if (segments.empty()) {
        return "";
    }
    const auto has_period_space = [](const std::string& s) {
        return s.find(". ") != std::string::npos;
    };
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out += segments[i];
        if (i + 1 < segments.size()) {
            const bool wide = has_period_space(segments[i]) || has_period_space(segments[i + 1]);
            out += wide ? "\n\n" : "\n";
        }
    }
    return out;
}

std::string fix_escapes(const std::string& text) {
    return rejoin_paragraphs(convert_newline_escapes(text));
}

std::string normalize_text(const std::string& text, const NormalizeConfig& config) {
    std::string t = text;
    if (config.fix_escapes) {
        t = convert_newline_escapes(t);
    }
    t = uniform_whitespace(t);
    if (config.punct_map.empty()) {
        t = replace_unicode_punct(t);
    } else {
        t = replace_unicode_punct(t, config.punct_map);
    }
    t = strip_incorrect_words(t, config);
    t = remove_lengthy_words(t, config.word_length_cutoff);
    if (config.fix_escapes) {
        t = rejoin_paragraphs(t);
    }
    return t;
}

bool normalize_document(Document& doc, const NormalizeConfig& config) {
    std::string normalized = normalize_text(doc.text, config);
    if (normalized == doc.text) {
        return false;
    }
    doc.text = std::move(normalized);
    return true;
}

std::set<std::string> load_blocklist(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open blocklist file: " + path);
    }
    std::set<std::string> terms;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            terms.insert(ascii_fold(line));
        }
    }
    return terms;
}

std::map<char32_t, std::string> load_punct_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open punct map file: " + path);
    }
    std::map<char32_t, std::string> map;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw std::runtime_error("punct map line " + std::to_string(line_no) +
                                     ": expected <char><TAB><replacement>");
        }
        std::size_t pos = 0;
        const std::string from = line.substr(0, tab);
        const char32_t cp = utf8::decode(from, pos);
        if (pos != from.size()) {
            throw std::runtime_error("punct map line " + std::to_string(line_no) +
                                     ": source must be a single character");
        }
        const std::string to = line.substr(tab + 1);
        for (char c : to) {
            if (static_cast<unsigned char>(c) >= 0x80) {
                throw std::runtime_error("punct map line " + std::to_string(line_no) +
                                         ": replacement must be ASCII");
            }
        }
        map[cp] = to;
    }
    return map;
}

}  // namespace sift
