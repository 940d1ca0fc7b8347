#pragma once

#include <cstdint>
#include <string_view>

#include "swat/core/types.hpp"
#include "swat/retrieval/vocabulary.hpp"

namespace swat::retrieval {

// Maps text and images into a shared space; outputs are unit-norm.
class TextImageEmbedder {
 public:
  virtual ~TextImageEmbedder() = default;

  virtual int text_dim() const = 0;
  virtual int image_dim() const = 0;
  virtual Vector embed_text(std::string_view text) const = 0;
  // `payload` is a feature vector or flattened image (see load_payload).
  virtual Vector embed_image(const Vector& payload) const = 0;
};

// Deterministic stand-in for a CLIP-style model. Text: sum of per-token
// Gaussian vectors seeded by the token hash, normalized. Images: the payload
// itself when its length equals dim, otherwise a fixed seeded Gaussian
// projection of it; normalized either way.
class ToyEmbedder final : public TextImageEmbedder {
 public:
  ToyEmbedder(int dim, std::uint64_t seed, int payload_dim = 0);

  int text_dim() const override { return dim_; }
  int image_dim() const override { return dim_; }
  Vector embed_text(std::string_view text) const override;
  Vector embed_image(const Vector& payload) const override;

  std::uint64_t seed() const { return seed_; }

 private:
  int dim_;
  std::uint64_t seed_;
  int payload_dim_;
  Matrix projection_;  // dim x payload_dim, empty when payload_dim == dim
};

// Unit-normalized mean of the concept's prompt embeddings.
Vector concept_text_embedding(const ConceptVocabulary& vocab, int concept_index,
                              const TextImageEmbedder& embedder);

// Scales v to unit L2 norm; throws on a zero or non-finite vector.
Vector unit_normalized(const Vector& v);

}  // namespace swat::retrieval
