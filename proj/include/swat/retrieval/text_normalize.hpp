#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace swat::retrieval {

// ASCII alphanumerics and every non-ASCII byte count as word characters, so a
// multi-byte UTF-8 letter is never split by a boundary.
constexpr bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Lowercases ASCII letters, collapses whitespace runs to one space, trims.
std::string normalize_text(std::string_view text);

// Maximal runs of word bytes in the normalized text.
std::vector<std::string> tokenize(std::string_view text);

// True when [begin, begin+len) in `haystack` is not a proper infix of a
// longer word token: a word byte at either edge of the occurrence must not be
// adjacent to another word byte outside it.
bool on_word_boundary(std::string_view haystack, std::size_t begin, std::size_t len);

}  // namespace swat::retrieval
