#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace supertml {

/// Strips ASCII spaces, tabs, CR and LF from both ends.
std::string_view trim(std::string_view s) noexcept;

bool is_valid_utf8(std::string_view s) noexcept;

/// Decodes UTF-8 into code points. Malformed sequences decode to U+FFFD one
/// byte at a time, so the result is total.
std::vector<char32_t> decode_utf8(std::string_view s);

/// Number of code points; the unit in which character budgets are counted.
std::size_t char_count(std::string_view s);

/// First `max_chars` code points of `s`.
std::string truncate_chars(std::string_view s, std::size_t max_chars);

}  // namespace supertml
