#include "supertml/text.hpp"

namespace supertml {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Length of the UTF-8 sequence starting at s[i], or 0 when malformed.
std::size_t sequence_length(std::string_view s, std::size_t i, char32_t* out) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        *out = b0;
        return 1;
    }
    std::size_t len = 0;
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
        return 0;
    }
    if (i + len > s.size()) return 0;
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range values.
    static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    *out = cp;
    return len;
}

}  // namespace

std::string_view trim(std::string_view s) noexcept {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

bool is_valid_utf8(std::string_view s) noexcept {
    for (std::size_t i = 0; i < s.size();) {
        char32_t cp;
        const std::size_t n = sequence_length(s, i, &cp);
        if (n == 0) return false;
        i += n;
    }
    return true;
}

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        char32_t cp;
        const std::size_t n = sequence_length(s, i, &cp);
        if (n == 0) {
            out.push_back(U'�');
            ++i;
        } else {
            out.push_back(cp);
            i += n;
        }
    }
    return out;
}

std::size_t char_count(std::string_view s) { return decode_utf8(s).size(); }

std::string truncate_chars(std::string_view s, std::size_t max_chars) {
    std::size_t i = 0;
    std::size_t count = 0;
    while (i < s.size() && count < max_chars) {
        char32_t cp;
        const std::size_t n = sequence_length(s, i, &cp);
        i += n == 0 ? 1 : n;
        ++count;
    }
    return std::string(s.substr(0, i));
}

}  // namespace supertml
