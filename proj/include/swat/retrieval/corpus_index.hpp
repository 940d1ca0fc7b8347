#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "swat/retrieval/corpus.hpp"
#include "swat/retrieval/vocabulary.hpp"

namespace swat::retrieval {

// Immutable index over a caption corpus. Captions are stored normalized
// (lowercase, single-spaced) in one contiguous arena. All const members are
// safe to call from several threads.
class CorpusIndex {
 public:
  // Rejects duplicate ids (the message names the id) and inconsistent
  // feature dimensions. An empty corpus yields a valid empty index.
  static CorpusIndex build(std::vector<CaptionRecord> records);

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const CaptionRecord& record(std::size_t i) const { return records_[i]; }
  const std::vector<CaptionRecord>& records() const { return records_; }
  std::optional<std::size_t> find(std::string_view id) const;
  std::string_view normalized_caption(std::size_t i) const;

  // For each pattern, ascending indices of the records whose normalized
  // caption contains it on word boundaries. Patterns are normalized first;
  // blank patterns match nothing.
  std::vector<std::vector<std::size_t>> query(const std::vector<std::string>& patterns) const;

 private:
  std::vector<CaptionRecord> records_;
  std::string arena_;
  std::vector<std::size_t> offsets_;  // size() + 1 entries
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct ConceptMatch {
  std::size_t record;  // index into the CorpusIndex
  std::string record_id;
  std::string matched_synonym;
};

// One list per vocabulary concept, in vocabulary order; each list is in
// corpus order and holds a record at most once, tagged with the first
// synonym (vocabulary order) that matched.
using MatchTable = std::vector<std::vector<ConceptMatch>>;

MatchTable string_match(const CorpusIndex& index, const ConceptVocabulary& vocab);

}  // namespace swat::retrieval
