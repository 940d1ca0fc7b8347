#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swat/core/json_io.hpp"

namespace swat::retrieval {

struct ConceptEntry {
  std::string name;
  std::vector<std::string> synonyms;
  std::vector<std::string> prompts;
};

// Ordered set of downstream concepts with their synonyms and text prompts.
// The concept name is always present among its own synonyms (inserted first
// when absent). Construction validates uniqueness and non-blank synonyms.
class ConceptVocabulary {
 public:
  ConceptVocabulary() = default;
  explicit ConceptVocabulary(std::vector<ConceptEntry> entries);

  // {"concept": {"synonyms": [...], "prompts": [...]}, ...}; object order is
  // concept order. Missing "prompts" defaults to "a photo of a <name>.".
  static ConceptVocabulary from_json(const Json& j);
  static ConceptVocabulary load(const std::filesystem::path& path);
  Json to_json() const;

  // Vocabulary whose concepts are named `prefix`0.. with default prompts.
  static ConceptVocabulary numbered(int count, const std::string& prefix = "concept_");

  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const ConceptEntry& operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<ConceptEntry>& entries() const { return entries_; }
  std::vector<std::string> names() const;
  std::optional<int> index_of(const std::string& name) const;

 private:
  std::vector<ConceptEntry> entries_;
};

}  // namespace swat::retrieval
