#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the scanner, ranker and bib store.
namespace incite::text {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);

inline bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
inline bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

/// Canonical decomposition with combining marks removed ("García" -> "Garcia").
/// Invalid UTF-8 is passed through unchanged.
std::string fold_diacritics(std::string_view utf8);

/// fold_diacritics followed by full Unicode lowercasing.
std::string fold_for_match(std::string_view utf8);

/// Lowercased word tokens split on anything that is not an ASCII letter or
/// digit. Bytes >= 0x80 count as word characters so accented words stay whole.
std::vector<std::string> word_tokens(std::string_view s);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

/// Number of code points in a UTF-8 string prefix.
std::size_t utf8_length(std::string_view s);

}  // namespace incite::text
