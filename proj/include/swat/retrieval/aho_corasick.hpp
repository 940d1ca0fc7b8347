#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace swat::retrieval {

// Byte-level Aho-Corasick automaton with sparse goto tables. Immutable after
// construction; scan() is safe to call concurrently.
class AhoCorasick {
 public:
  struct Hit {
    std::uint32_t pattern;
    std::size_t begin;
  };

  explicit AhoCorasick(const std::vector<std::string>& patterns);

  std::size_t pattern_count() const { return lengths_.size(); }
  std::size_t state_count() const { return nodes_.size(); }

  // Calls on_hit(Hit) for every occurrence (overlaps included) in text order
  // of end position.
  template <typename OnHit>
  void scan(std::string_view text, OnHit&& on_hit) const;

 private:
  struct Node {
    std::vector<std::pair<unsigned char, std::int32_t>> next;  // sorted by byte
    std::int32_t fail = 0;
    std::int32_t dict = -1;      // nearest suffix state that ends a pattern
    std::int32_t pattern = -1;   // pattern ending exactly here
  };

  std::int32_t child(std::int32_t state, unsigned char c) const;
  std::int32_t step(std::int32_t state, unsigned char c) const;

  std::vector<Node> nodes_;
  std::vector<std::size_t> lengths_;
  // Patterns that are duplicates of an earlier one, keyed by node.
  std::vector<std::vector<std::int32_t>> aliases_;
};

template <typename OnHit>
void AhoCorasick::scan(std::string_view text, OnHit&& on_hit) const {
  std::int32_t state = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    state = step(state, static_cast<unsigned char>(text[i]));
    for (std::int32_t s = nodes_[static_cast<std::size_t>(state)].pattern >= 0
                              ? state
                              : nodes_[static_cast<std::size_t>(state)].dict;
         s >= 0; s = nodes_[static_cast<std::size_t>(s)].dict) {
      const auto& node = nodes_[static_cast<std::size_t>(s)];
      const auto p = static_cast<std::size_t>(node.pattern);
      const std::size_t begin = i + 1 - lengths_[p];
      on_hit(Hit{static_cast<std::uint32_t>(p), begin});
      for (std::int32_t alias : aliases_[static_cast<std::size_t>(s)]) {
        on_hit(Hit{static_cast<std::uint32_t>(alias), begin});
      }
    }
  }
}

}  // namespace swat::retrieval
