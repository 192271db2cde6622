#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// Thin UTF-8 helpers over ICU.
namespace stresslens::text {

/// NFC-normalizes and lowercases UTF-8 text. ASCII input takes a fast path.
/// Throws DataError on invalid UTF-8.
std::string normalize_lower(std::string_view utf8);

bool is_ascii(std::string_view s) noexcept;
bool is_valid_utf8(std::string_view s) noexcept;

/// Number of Unicode code points; assumes valid UTF-8.
std::size_t code_point_count(std::string_view utf8) noexcept;

/// True when the text holds only white space (or nothing).
bool is_blank(std::string_view utf8) noexcept;

}  // namespace stresslens::text
