#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/datasets/labeled_set.hpp"
#include "swat/retrieval/vocabulary.hpp"

namespace swat::datasets {

// Gaussian class-conditional task with a text-anchored zero-shot prior, a
// per-class domain shift on the retrieved source and Zipf-imbalanced
// retrieved counts.
struct SyntheticTaskSpec {
  int num_concepts = 50;
  int dim = 64;
  double domain_shift = 2.0;      // |shift| in units of sigma
  double zipf_s = 1.0;
  double noise_rate = 0.0;        // fraction of retrieved labels reassigned
  std::uint64_t seed = 0;

  int retrieval_size = 500;       // per-class cap on retrieved examples
  int train_per_class = 100;      // downstream pool the few-shot split draws from
  int test_per_class = 50;
  double sigma = 1.0;             // within-class std per coordinate
  double class_separation = 5.0;  // norm of each class mean
  double text_noise = 1.0;        // misalignment of class means from their prompt embeddings
  double shift_correlation = 0.9; // cosine between a class's shift and the shared shift direction

  void validate() const;
  Json to_json() const;
  // Missing keys keep defaults; unknown keys throw naming "<where>.<key>".
  static SyntheticTaskSpec from_json(const Json& j, const std::string& where = "synthetic");
};

struct SyntheticTask {
  SyntheticTaskSpec spec;
  retrieval::ConceptVocabulary vocab;
  LabeledSet train_pool;
  LabeledSet retrieved;
  LabeledSet test;
  std::vector<int> retrieved_counts;  // per class, before label noise
};

// Seed of the toy embedder that anchors the task's class means.
std::uint64_t synthetic_embedder_seed(const SyntheticTaskSpec& spec);

// Fully determined by spec (including spec.seed).
SyntheticTask generate_synthetic_task(const SyntheticTaskSpec& spec);

// Per-class Zipf counts: max(1, round(cap * r^-s)) for the class with
// popularity rank r (1-based).
std::vector<int> zipf_counts(int num_concepts, int cap, double s);

}  // namespace swat::datasets
