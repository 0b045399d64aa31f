#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sift::utf8 {

// Decodes the codepoint starting at str[pos] and advances pos past it.
// Invalid byte sequences are decoded as single bytes (one byte -> one
// codepoint) so the pipeline never throws on dirty input.
inline char32_t decode(std::string_view str, std::size_t& pos) {
    const auto byte = [&](std::size_t i) -> std::uint8_t {
        return static_cast<std::uint8_t>(str[i]);
    };
    const std::uint8_t b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return b0;  // stray continuation byte
    }
    if (pos + len > str.size()) {
        ++pos;
        return b0;
    }
    for (int i = 1; i < len; ++i) {
        if ((byte(pos + i) & 0xC0) != 0x80) {
            ++pos;
            return b0;
        }
        cp = (cp << 6) | (byte(pos + i) & 0x3F);
    }
    pos += len;
    return cp;
}

inline void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::vector<char32_t> decode_all(std::string_view str) {
    std::vector<char32_t> cps;
    cps.reserve(str.size());
    std::size_t pos = 0;
    while (pos < str.size()) {
        cps.push_back(decode(str, pos));
    }
    return cps;
}

inline std::string encode_all(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        encode(cp, out);
    }
    return out;
}

// Number of codepoints in the string.
inline std::size_t length(std::string_view str) {
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < str.size()) {
        decode(str, pos);
        ++n;
    }
    return n;
}

}  // namespace sift::utf8
