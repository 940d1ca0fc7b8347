#include "swat/retrieval/aho_corasick.hpp"

#include <algorithm>
#include <deque>

namespace swat::retrieval {

AhoCorasick::AhoCorasick(const std::vector<std::string>& patterns) {
  nodes_.emplace_back();
  aliases_.emplace_back();
  lengths_.reserve(patterns.size());
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    const std::string& pat = patterns[p];
    lengths_.push_back(pat.size());
    if (pat.empty()) continue;
    std::int32_t state = 0;
    for (char ch : pat) {
      const auto c = static_cast<unsigned char>(ch);
      std::int32_t nxt = child(state, c);
      if (nxt < 0) {
        nxt = static_cast<std::int32_t>(nodes_.size());
        auto& edges = nodes_[static_cast<std::size_t>(state)].next;
        edges.insert(std::lower_bound(edges.begin(), edges.end(), std::make_pair(c, std::int32_t{0})),
                     {c, nxt});
        nodes_.emplace_back();
        aliases_.emplace_back();
      }
      state = nxt;
    }
    auto& node = nodes_[static_cast<std::size_t>(state)];
    if (node.pattern < 0) {
      node.pattern = static_cast<std::int32_t>(p);
    } else {
      aliases_[static_cast<std::size_t>(state)].push_back(static_cast<std::int32_t>(p));
    }
  }

  // Breadth-first failure and dictionary links.
  std::deque<std::int32_t> queue;
  for (const auto& [c, s] : nodes_[0].next) {
    nodes_[static_cast<std::size_t>(s)].fail = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const std::int32_t u = queue.front();
    queue.pop_front();
    for (const auto& [c, v] : nodes_[static_cast<std::size_t>(u)].next) {
      std::int32_t f = nodes_[static_cast<std::size_t>(u)].fail;
      while (f > 0 && child(f, c) < 0) f = nodes_[static_cast<std::size_t>(f)].fail;
      const std::int32_t fc = child(f, c);
      auto& vn = nodes_[static_cast<std::size_t>(v)];
      vn.fail = (fc >= 0 && fc != v) ? fc : 0;
      const auto& fn = nodes_[static_cast<std::size_t>(vn.fail)];
      vn.dict = fn.pattern >= 0 ? vn.fail : fn.dict;
      queue.push_back(v);
    }
  }
}

std::int32_t AhoCorasick::child(std::int32_t state, unsigned char c) const {
  const auto& edges = nodes_[static_cast<std::size_t>(state)].next;
  auto it = std::lower_bound(edges.begin(), edges.end(), c,
                             [](const auto& e, unsigned char key) { return e.first < key; });
  return (it != edges.end() && it->first == c) ? it->second : -1;
}

std::int32_t AhoCorasick::step(std::int32_t state, unsigned char c) const {
  while (true) {
    const std::int32_t nxt = child(state, c);
    if (nxt >= 0) return nxt;
    if (state == 0) return 0;
    state = nodes_[static_cast<std::size_t>(state)].fail;
  }
}

}  // namespace swat::retrieval
