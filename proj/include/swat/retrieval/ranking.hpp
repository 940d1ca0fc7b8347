#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swat/retrieval/corpus_index.hpp"
#include "swat/retrieval/embedder.hpp"
#include "swat/retrieval/vocabulary.hpp"

namespace swat::retrieval {

enum class RankMethod {
  kT2T,               // concept prompt vs caption
  kI2I,               // few-shot images vs candidate image
  kI2TImageCaption,   // few-shot images vs caption
  kI2TConceptImage,   // concept prompt vs candidate image
  kRandom,
};

RankMethod parse_rank_method(std::string_view text);
std::string_view to_string(RankMethod method);

struct RetrievalCandidate {
  std::string record_id;
  std::size_t record = 0;
  std::string matched_synonym;
  double score = 0.0;
  int rank = 0;  // 1-based

  friend bool operator==(const RetrievalCandidate&, const RetrievalCandidate&) = default;
};

struct ConceptCandidates {
  std::string concept_name;
  std::vector<RetrievalCandidate> items;

  friend bool operator==(const ConceptCandidates&, const ConceptCandidates&) = default;
};

// One entry per vocabulary concept, in vocabulary order.
using RankedCandidates = std::vector<ConceptCandidates>;

// Payloads of the few-shot images per concept (vocabulary order).
using FewShotPayloads = std::vector<std::vector<Vector>>;

struct RankContext {
  const CorpusIndex& index;
  const ConceptVocabulary& vocab;
  const TextImageEmbedder& embedder;
  const FewShotPayloads* fewshot = nullptr;  // required by kI2I / kI2TImageCaption
  std::uint64_t seed = 0;                   // drives kRandom
};

// Scores every matched record and sorts each concept's list by descending
// score, ties broken by ascending record id; ranks are 1..N.
RankedCandidates rank(const MatchTable& matches, RankMethod method, const RankContext& ctx);

// Keeps candidates whose image has cosine >= threshold with the concept's
// prompt embedding. Order is preserved and ranks are renumbered.
RankedCandidates filter_by_image_similarity(const RankedCandidates& candidates, double threshold,
                                            const RankContext& ctx);

struct RetrievedPool {
  int retrieval_size = 0;
  RankedCandidates per_concept;

  std::vector<int> counts() const;
  std::size_t total() const;

  friend bool operator==(const RetrievedPool&, const RetrievedPool&) = default;
};

// First min(k, available) candidates per concept.
RetrievedPool select_top_k(const RankedCandidates& candidates, int k = 500);

struct ImbalanceStats {
  std::vector<int> counts;        // vocabulary order
  std::vector<int> sorted_curve;  // descending
  int min = 0;
  int max = 0;
  double mean = 0.0;
  double gini = 0.0;
  std::size_t total = 0;
};

ImbalanceStats imbalance_stats(std::span<const int> counts);
ImbalanceStats imbalance_stats(const RetrievedPool& pool);

// Mean-absolute-difference Gini: sum_ij |x_i - x_j| / (2 n^2 mean).
double gini_coefficient(std::span<const double> values);

}  // namespace swat::retrieval
