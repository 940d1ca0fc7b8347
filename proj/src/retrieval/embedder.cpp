#include "swat/retrieval/embedder.hpp"

#include <cmath>
#include <random>
#include <string>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/rng.hpp"
#include "swat/retrieval/text_normalize.hpp"

namespace swat::retrieval {

Vector unit_normalized(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero or non-finite vector");
  return v / n;
}

ToyEmbedder::ToyEmbedder(int dim, std::uint64_t seed, int payload_dim)
    : dim_(dim), seed_(seed), payload_dim_(payload_dim == 0 ? dim : payload_dim) {
  if (dim_ < 1 || payload_dim_ < 1) throw InvalidArgument("embedder dimensions must be positive");
  if (payload_dim_ != dim_) {
    Rng rng(mix_seed(seed_, 0x1a6e));
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(payload_dim_)));
    projection_.resize(dim_, payload_dim_);
    for (Eigen::Index i = 0; i < projection_.size(); ++i) projection_.data()[i] = normal(rng);
  }
}

Vector ToyEmbedder::embed_text(std::string_view text) const {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw InvalidArgument("cannot embed text without word tokens: '" + std::string(text) + "'");
  Vector sum = Vector::Zero(dim_);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& tok : tokens) {
    Rng rng(mix_seed(seed_, fnv1a(tok)));
    for (int i = 0; i < dim_; ++i) sum[i] += normal(rng);
    normal.reset();
  }
  return unit_normalized(sum);
}

Vector ToyEmbedder::embed_image(const Vector& payload) const {
  if (payload.size() != payload_dim_) {
    throw InvalidArgument("image payload has dimension " + std::to_string(payload.size()) +
                          ", embedder expects " + std::to_string(payload_dim_));
  }
  if (payload_dim_ == dim_) return unit_normalized(payload);
  return unit_normalized(projection_ * payload);
}

Vector concept_text_embedding(const ConceptVocabulary& vocab, int concept_index,
                              const TextImageEmbedder& embedder) {
  const auto& entry = vocab[concept_index];
  if (entry.prompts.empty()) throw InvalidArgument("concept '" + entry.name + "' has no prompt");
  Vector sum = Vector::Zero(embedder.text_dim());
  for (const auto& p : entry.prompts) sum += embedder.embed_text(p);
  return unit_normalized(sum);
}

}  // namespace swat::retrieval
