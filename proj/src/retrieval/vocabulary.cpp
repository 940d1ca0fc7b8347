#include "swat/retrieval/vocabulary.hpp"

#include <algorithm>
#include <unordered_set>

#include "swat/core/error.hpp"
#include "swat/retrieval/text_normalize.hpp"

namespace swat::retrieval {

namespace {

bool is_blank(const std::string& s) { return normalize_text(s).empty(); }

std::string default_prompt(const std::string& name) { return "a photo of a " + name + "."; }

std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidArgument(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw InvalidArgument(where + " must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

ConceptVocabulary::ConceptVocabulary(std::vector<ConceptEntry> entries) : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (auto& e : entries_) {
    if (is_blank(e.name)) throw InvalidArgument("concept name must not be blank");
    if (!seen.insert(e.name).second) throw InvalidArgument("duplicate concept '" + e.name + "'");
    for (const auto& s : e.synonyms) {
      if (is_blank(s)) throw InvalidArgument("concept '" + e.name + "' has a blank synonym");
    }
    if (std::find(e.synonyms.begin(), e.synonyms.end(), e.name) == e.synonyms.end()) {
      e.synonyms.insert(e.synonyms.begin(), e.name);
    }
  }
}

ConceptVocabulary ConceptVocabulary::from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("vocabulary must be a JSON object keyed by concept");
  std::vector<ConceptEntry> entries;
  for (const auto& [name, body] : j.items()) {
    ConceptEntry e{name, {}, {}};
    if (!body.is_object()) throw InvalidArgument("vocabulary entry '" + name + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      if (key == "synonyms") {
        e.synonyms = string_list(value, name + ".synonyms");
      } else if (key == "prompts") {
        e.prompts = string_list(value, name + ".prompts");
      } else {
        throw InvalidArgument("unknown vocabulary key '" + name + "." + key + "'");
      }
    }
    if (!body.contains("prompts")) e.prompts.push_back(default_prompt(name));
    entries.push_back(std::move(e));
  }
  return ConceptVocabulary(std::move(entries));
}

ConceptVocabulary ConceptVocabulary::load(const std::filesystem::path& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

Json ConceptVocabulary::to_json() const {
  Json j = Json::object();
  for (const auto& e : entries_) {
    j[e.name] = Json{{"synonyms", e.synonyms}, {"prompts", e.prompts}};
  }
  return j;
}

ConceptVocabulary ConceptVocabulary::numbered(int count, const std::string& prefix) {
  std::vector<ConceptEntry> entries;
  for (int i = 0; i < count; ++i) {
    std::string name = prefix + std::to_string(i);
    entries.push_back({name, {name}, {default_prompt(name)}});
  }
  return ConceptVocabulary(std::move(entries));
}

std::vector<std::string> ConceptVocabulary::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::optional<int> ConceptVocabulary::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace swat::retrieval
