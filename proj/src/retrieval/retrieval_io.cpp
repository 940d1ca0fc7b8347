#include "swat/retrieval/retrieval_io.hpp"

#include <fstream>

#include "swat/core/error.hpp"

namespace swat::retrieval {

void write_pool_jsonl(const std::filesystem::path& path, const RetrievedPool& pool) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& concept_list : pool.per_concept) {
    for (const auto& c : concept_list.items) {
      Json line = Json::object();
      line["concept"] = concept_list.concept_name;
      line["record_id"] = c.record_id;
      line["score"] = c.score;
      line["rank"] = c.rank;
      line["matched_synonym"] = c.matched_synonym;
      out << line.dump() << "\n";
    }
  }
}

RetrievedPool read_pool_jsonl(const std::filesystem::path& path, const CorpusIndex& index,
                              const ConceptVocabulary& vocab, int retrieval_size) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  RetrievedPool pool;
  pool.retrieval_size = retrieval_size;
  pool.per_concept.resize(static_cast<std::size_t>(vocab.size()));
  for (int c = 0; c < vocab.size(); ++c) pool.per_concept[static_cast<std::size_t>(c)].concept_name = vocab[c].name;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw IoError(where + ": " + e.what());
    }
    const auto concept_idx = vocab.index_of(j.at("concept").get<std::string>());
    if (!concept_idx) throw IoError(where + ": unknown concept");
    const auto record = index.find(j.at("record_id").get<std::string>());
    if (!record) throw IoError(where + ": record id not in corpus");
    pool.per_concept[static_cast<std::size_t>(*concept_idx)].items.push_back(
        {j["record_id"].get<std::string>(), *record, j.at("matched_synonym").get<std::string>(),
         j.at("score").get<double>(), j.at("rank").get<int>()});
  }
  return pool;
}

Json stats_to_json(const ImbalanceStats& stats, const ConceptVocabulary& vocab) {
  Json counts = Json::object();
  for (std::size_t i = 0; i < stats.counts.size(); ++i) {
    counts[i < static_cast<std::size_t>(vocab.size()) ? vocab[static_cast<int>(i)].name : std::to_string(i)] =
        stats.counts[i];
  }
  return Json{{"counts", counts},       {"sorted_curve", stats.sorted_curve},
              {"total", stats.total},   {"min", stats.min},
              {"max", stats.max},       {"mean", stats.mean},
              {"gini", stats.gini}};
}

}  // namespace swat::retrieval
