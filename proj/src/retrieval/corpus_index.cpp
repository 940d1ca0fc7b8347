#include "swat/retrieval/corpus_index.hpp"

#include <algorithm>

#include "swat/core/error.hpp"
#include "swat/core/parallel.hpp"
#include "swat/retrieval/aho_corasick.hpp"
#include "swat/retrieval/text_normalize.hpp"

namespace swat::retrieval {

namespace {
constexpr std::size_t kChunk = 4096;
}

CorpusIndex CorpusIndex::build(std::vector<CaptionRecord> records) {
  CorpusIndex index;
  index.by_id_.reserve(records.size());
  index.offsets_.reserve(records.size() + 1);
  index.offsets_.push_back(0);
  Eigen::Index feature_dim = -1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!index.by_id_.emplace(r.id, i).second) {
      throw InvalidArgument("duplicate corpus record id '" + r.id + "'");
    }
    if (r.has_features()) {
      const Eigen::Index d = std::get<Vector>(r.image).size();
      if (feature_dim < 0) feature_dim = d;
      if (d != feature_dim) {
        throw InvalidArgument("record '" + r.id + "' has feature dimension " + std::to_string(d) +
                              ", corpus uses " + std::to_string(feature_dim));
      }
    }
    index.arena_ += normalize_text(r.caption);
    index.offsets_.push_back(index.arena_.size());
  }
  index.records_ = std::move(records);
  return index;
}

std::optional<std::size_t> CorpusIndex::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::string_view CorpusIndex::normalized_caption(std::size_t i) const {
  return std::string_view(arena_).substr(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::vector<std::vector<std::size_t>> CorpusIndex::query(const std::vector<std::string>& patterns) const {
  std::vector<std::string> normalized;
  normalized.reserve(patterns.size());
  for (const auto& p : patterns) normalized.push_back(normalize_text(p));
  const AhoCorasick automaton(normalized);

  // Per chunk: (pattern, record) pairs, already in record order.
  const std::size_t n_chunks = (size() + kChunk - 1) / kChunk;
  std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> chunk_hits(n_chunks);
  parallel_for(n_chunks, [&](std::size_t c) {
    auto& hits = chunk_hits[c];
    std::vector<std::uint32_t> seen;
    const std::size_t end = std::min(size(), (c + 1) * kChunk);
    for (std::size_t r = c * kChunk; r < end; ++r) {
      const std::string_view caption = normalized_caption(r);
      seen.clear();
      automaton.scan(caption, [&](const AhoCorasick::Hit& h) {
        if (on_word_boundary(caption, h.begin, normalized[h.pattern].size())) seen.push_back(h.pattern);
      });
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (std::uint32_t p : seen) hits.emplace_back(p, r);
    }
  });

  std::vector<std::vector<std::size_t>> out(patterns.size());
  for (const auto& hits : chunk_hits) {
    for (const auto& [p, r] : hits) out[p].push_back(r);
  }
  return out;
}

MatchTable string_match(const CorpusIndex& index, const ConceptVocabulary& vocab) {
  std::vector<std::string> patterns;
  std::vector<std::pair<int, int>> owner;  // (concept, synonym) per pattern
  for (int c = 0; c < vocab.size(); ++c) {
    const auto& syns = vocab[c].synonyms;
    for (std::size_t s = 0; s < syns.size(); ++s) {
      patterns.push_back(syns[s]);
      owner.emplace_back(c, static_cast<int>(s));
    }
  }
  const auto hits = index.query(patterns);

  // Best (lowest) synonym position per (concept, record).
  std::vector<std::vector<std::pair<std::size_t, int>>> per_concept(static_cast<std::size_t>(vocab.size()));
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    const auto [c, s] = owner[p];
    for (std::size_t r : hits[p]) per_concept[static_cast<std::size_t>(c)].emplace_back(r, s);
  }
  MatchTable table(static_cast<std::size_t>(vocab.size()));
  for (int c = 0; c < vocab.size(); ++c) {
    auto& pairs = per_concept[static_cast<std::size_t>(c)];
    std::sort(pairs.begin(), pairs.end());
    auto& out = table[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i > 0 && pairs[i].first == pairs[i - 1].first) continue;
      const std::size_t r = pairs[i].first;
      out.push_back({r, index.record(r).id, vocab[c].synonyms[static_cast<std::size_t>(pairs[i].second)]});
    }
  }
  return table;
}

}  // namespace swat::retrieval
