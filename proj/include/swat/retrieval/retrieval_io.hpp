#pragma once

#include <filesystem>

#include "swat/core/json_io.hpp"
#include "swat/retrieval/ranking.hpp"

namespace swat::retrieval {

// One line per selected record: {concept, record_id, score, rank, matched_synonym}.
void write_pool_jsonl(const std::filesystem::path& path, const RetrievedPool& pool);
RetrievedPool read_pool_jsonl(const std::filesystem::path& path, const CorpusIndex& index,
                              const ConceptVocabulary& vocab, int retrieval_size);

Json stats_to_json(const ImbalanceStats& stats, const ConceptVocabulary& vocab);

}  // namespace swat::retrieval
