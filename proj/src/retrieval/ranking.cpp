#include "swat/retrieval/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/parallel.hpp"
#include "swat/core/rng.hpp"

namespace swat::retrieval {

RankMethod parse_rank_method(std::string_view text) {
  if (text == "t2t") return RankMethod::kT2T;
  if (text == "i2i") return RankMethod::kI2I;
  if (text == "i2t-cap") return RankMethod::kI2TImageCaption;
  if (text == "i2t-img") return RankMethod::kI2TConceptImage;
  if (text == "random") return RankMethod::kRandom;
  throw InvalidArgument("unknown rank method '" + std::string(text) + "' (t2t, i2i, i2t-cap, i2t-img, random)");
}

std::string_view to_string(RankMethod method) {
  switch (method) {
    case RankMethod::kT2T: return "t2t";
    case RankMethod::kI2I: return "i2i";
    case RankMethod::kI2TImageCaption: return "i2t-cap";
    case RankMethod::kI2TConceptImage: return "i2t-img";
    case RankMethod::kRandom: return "random";
  }
  return "?";
}

namespace {

void check_dims(const TextImageEmbedder& embedder) {
  if (embedder.text_dim() != embedder.image_dim()) {
    throw InvalidArgument("embedder text dimension " + std::to_string(embedder.text_dim()) +
                          " differs from image dimension " + std::to_string(embedder.image_dim()));
  }
}

Vector checked(Vector v, int expected, const char* what) {
  if (v.size() != expected) {
    throw InvalidArgument(std::string(what) + " embedding has dimension " + std::to_string(v.size()) +
                          ", expected " + std::to_string(expected));
  }
  return v;
}

// Lazily filled per-record embedding cache, computed up front for the
// records that are actually needed.
class EmbeddingCache {
 public:
  enum class Kind { kCaption, kImage };

  EmbeddingCache(const RankContext& ctx, Kind kind) : ctx_(ctx), kind_(kind), slots_(ctx.index.size()) {}

  void prefetch(const std::vector<std::size_t>& records) {
    parallel_for(records.size(), [&](std::size_t i) {
      const std::size_t r = records[i];
      const auto& rec = ctx_.index.record(r);
      slots_[r] = kind_ == Kind::kCaption
                      ? checked(ctx_.embedder.embed_text(rec.caption), ctx_.embedder.text_dim(), "caption")
                      : checked(ctx_.embedder.embed_image(load_payload(rec)), ctx_.embedder.image_dim(), "image");
    });
  }

  const Vector& at(std::size_t r) const { return *slots_[r]; }

 private:
  const RankContext& ctx_;
  Kind kind_;
  std::vector<std::optional<Vector>> slots_;
};

std::vector<std::size_t> needed_records(const MatchTable& matches) {
  std::vector<std::size_t> out;
  for (const auto& list : matches)
    for (const auto& m : list) out.push_back(m.record);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> needed_records(const RankedCandidates& cands) {
  std::vector<std::size_t> out;
  for (const auto& list : cands)
    for (const auto& c : list.items) out.push_back(c.record);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void sort_and_number(std::vector<RetrievalCandidate>& items) {
  std::sort(items.begin(), items.end(), [](const RetrievalCandidate& a, const RetrievalCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.record_id < b.record_id;
  });
  for (std::size_t i = 0; i < items.size(); ++i) items[i].rank = static_cast<int>(i) + 1;
}

double max_cosine(const std::vector<Vector>& queries, const Vector& target) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& q : queries) best = std::max(best, q.dot(target));
  return best;
}

}  // namespace

RankedCandidates rank(const MatchTable& matches, RankMethod method, const RankContext& ctx) {
  if (matches.size() != static_cast<std::size_t>(ctx.vocab.size())) {
    throw InvalidArgument("match table has " + std::to_string(matches.size()) + " concepts, vocabulary has " +
                          std::to_string(ctx.vocab.size()));
  }
  const int n_concepts = ctx.vocab.size();
  const bool needs_fewshot = method == RankMethod::kI2I || method == RankMethod::kI2TImageCaption;
  if (method != RankMethod::kRandom) check_dims(ctx.embedder);

  std::vector<std::vector<Vector>> fewshot_emb(static_cast<std::size_t>(n_concepts));
  if (needs_fewshot) {
    std::size_t total = 0;
    if (ctx.fewshot != nullptr) {
      for (const auto& l : *ctx.fewshot) total += l.size();
    }
    if (ctx.fewshot == nullptr || total == 0) {
      throw InvalidArgument(std::string(to_string(method)) + " ranking requires a non-empty few-shot set");
    }
    if (ctx.fewshot->size() != static_cast<std::size_t>(n_concepts)) {
      throw InvalidArgument("few-shot payloads cover " + std::to_string(ctx.fewshot->size()) +
                            " concepts, vocabulary has " + std::to_string(n_concepts));
    }
    for (int c = 0; c < n_concepts; ++c) {
      const auto& payloads = (*ctx.fewshot)[static_cast<std::size_t>(c)];
      if (payloads.empty() && !matches[static_cast<std::size_t>(c)].empty()) {
        throw InvalidArgument("concept '" + ctx.vocab[c].name + "' has candidates but no few-shot images");
      }
      for (const auto& p : payloads) {
        fewshot_emb[static_cast<std::size_t>(c)].push_back(
            checked(ctx.embedder.embed_image(p), ctx.embedder.image_dim(), "few-shot image"));
      }
    }
  }

  std::vector<Vector> prompt_emb(static_cast<std::size_t>(n_concepts));
  if (method == RankMethod::kT2T || method == RankMethod::kI2TConceptImage) {
    for (int c = 0; c < n_concepts; ++c) {
      if (matches[static_cast<std::size_t>(c)].empty()) continue;
      prompt_emb[static_cast<std::size_t>(c)] =
          checked(concept_text_embedding(ctx.vocab, c, ctx.embedder), ctx.embedder.text_dim(), "prompt");
    }
  }

  std::optional<EmbeddingCache> cache;
  if (method == RankMethod::kT2T || method == RankMethod::kI2TImageCaption) {
    cache.emplace(ctx, EmbeddingCache::Kind::kCaption);
  } else if (method == RankMethod::kI2I || method == RankMethod::kI2TConceptImage) {
    cache.emplace(ctx, EmbeddingCache::Kind::kImage);
  }
  if (cache) cache->prefetch(needed_records(matches));

  RankedCandidates out(static_cast<std::size_t>(n_concepts));
  parallel_for(static_cast<std::size_t>(n_concepts), [&](std::size_t c) {
    auto& slot = out[c];
    slot.concept_name = ctx.vocab[static_cast<int>(c)].name;
    Rng rng(mix_seed(ctx.seed, c));
    for (const auto& m : matches[c]) {
      double score = 0.0;
      switch (method) {
        case RankMethod::kT2T:
        case RankMethod::kI2TConceptImage:
          score = prompt_emb[c].dot(cache->at(m.record));
          break;
        case RankMethod::kI2I:
        case RankMethod::kI2TImageCaption:
          score = max_cosine(fewshot_emb[c], cache->at(m.record));
          break;
        case RankMethod::kRandom:
          score = uniform01(rng);
          break;
      }
      slot.items.push_back({m.record_id, m.record, m.matched_synonym, score, 0});
    }
    sort_and_number(slot.items);
  });
  return out;
}

RankedCandidates filter_by_image_similarity(const RankedCandidates& candidates, double threshold,
                                            const RankContext& ctx) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw InvalidArgument("image-similarity threshold must lie in [-1, 1], got " + std::to_string(threshold));
  }
  if (candidates.size() != static_cast<std::size_t>(ctx.vocab.size())) {
    throw InvalidArgument("candidate lists do not match the vocabulary");
  }
  check_dims(ctx.embedder);
  EmbeddingCache cache(ctx, EmbeddingCache::Kind::kImage);
  cache.prefetch(needed_records(candidates));

  RankedCandidates out(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    out[c].concept_name = candidates[c].concept_name;
    if (candidates[c].items.empty()) continue;
    const Vector prompt = concept_text_embedding(ctx.vocab, static_cast<int>(c), ctx.embedder);
    for (const auto& cand : candidates[c].items) {
      if (prompt.dot(cache.at(cand.record)) >= threshold) {
        out[c].items.push_back(cand);
        out[c].items.back().rank = static_cast<int>(out[c].items.size());
      }
    }
  }
  return out;
}

std::vector<int> RetrievedPool::counts() const {
  std::vector<int> out;
  out.reserve(per_concept.size());
  for (const auto& c : per_concept) out.push_back(static_cast<int>(c.items.size()));
  return out;
}

std::size_t RetrievedPool::total() const {
  std::size_t n = 0;
  for (const auto& c : per_concept) n += c.items.size();
  return n;
}

RetrievedPool select_top_k(const RankedCandidates& candidates, int k) {
  if (k <= 0) throw InvalidArgument("select_top_k requires k > 0, got " + std::to_string(k));
  RetrievedPool pool;
  pool.retrieval_size = k;
  pool.per_concept.reserve(candidates.size());
  for (const auto& c : candidates) {
    ConceptCandidates kept{c.concept_name, {}};
    const std::size_t n = std::min(c.items.size(), static_cast<std::size_t>(k));
    kept.items.assign(c.items.begin(), c.items.begin() + static_cast<std::ptrdiff_t>(n));
    pool.per_concept.push_back(std::move(kept));
  }
  return pool;
}

double gini_coefficient(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("Gini coefficient of an empty set");
  const double n = static_cast<double>(values.size());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  if (!(sum > 0.0)) throw InvalidArgument("Gini coefficient undefined when all counts are zero");
  // Sorted form of the mean absolute difference: sum_i (2i - n - 1) x_(i).
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
  }
  return acc / (n * sum);
}

ImbalanceStats imbalance_stats(std::span<const int> counts) {
  if (counts.empty()) throw InvalidArgument("imbalance statistics need a non-empty pool");
  ImbalanceStats s;
  s.counts.assign(counts.begin(), counts.end());
  s.sorted_curve = s.counts;
  std::sort(s.sorted_curve.begin(), s.sorted_curve.end(), std::greater<>());
  s.max = s.sorted_curve.front();
  s.min = s.sorted_curve.back();
  for (int c : counts) {
    if (c < 0) throw InvalidArgument("negative count in pool");
    s.total += static_cast<std::size_t>(c);
  }
  if (s.total == 0) throw InvalidArgument("imbalance statistics need a non-empty pool");
  s.mean = static_cast<double>(s.total) / static_cast<double>(counts.size());
  std::vector<double> as_double(counts.begin(), counts.end());
  s.gini = gini_coefficient(as_double);
  return s;
}

ImbalanceStats imbalance_stats(const RetrievedPool& pool) {
  const auto counts = pool.counts();
  return imbalance_stats(std::span<const int>(counts));
}

}  // namespace swat::retrieval
