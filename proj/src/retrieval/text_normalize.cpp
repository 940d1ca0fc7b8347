#include "swat/retrieval/text_normalize.hpp"

namespace swat::retrieval {

namespace {
constexpr bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  const std::string norm = normalize_text(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < norm.size()) {
    while (i < norm.size() && !is_word_byte(static_cast<unsigned char>(norm[i]))) ++i;
    const std::size_t start = i;
    while (i < norm.size() && is_word_byte(static_cast<unsigned char>(norm[i]))) ++i;
    if (i > start) tokens.emplace_back(norm.substr(start, i - start));
  }
  return tokens;
}

bool on_word_boundary(std::string_view haystack, std::size_t begin, std::size_t len) {
  if (len == 0 || begin + len > haystack.size()) return false;
  const auto at = [&](std::size_t i) { return static_cast<unsigned char>(haystack[i]); };
  if (is_word_byte(at(begin)) && begin > 0 && is_word_byte(at(begin - 1))) return false;
  const std::size_t last = begin + len - 1;
  if (is_word_byte(at(last)) && last + 1 < haystack.size() && is_word_byte(at(last + 1))) return false;
  return true;
}

}  // namespace swat::retrieval
