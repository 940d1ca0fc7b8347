#pragma once

#include <cstdint>

#include "swat/core/json_io.hpp"
#include "swat/datasets/labeled_set.hpp"

namespace swat::datasets {

struct FewShotSplit {
  int shots = 0;
  std::uint64_t seed = 0;
  LabeledSet examples;  // exactly `shots` per class, all kFewShot

  // {seed, shots, ids: {concept: [id, ...]}}
  Json to_json() const;
  // Rebuilds the split by looking the persisted ids up in `pool`.
  static FewShotSplit from_json(const Json& j, const LabeledSet& pool);
};

// Draws `shots` examples per class without replacement; a pure function of
// (pool, shots, seed). Throws naming the first class with too few examples.
FewShotSplit sample_few_shot(const LabeledSet& pool, int shots, std::uint64_t seed);

// Concatenates retrieved then few-shot examples without resampling. An empty
// retrieved set (no rows) is accepted regardless of its class names.
LabeledSet mix_pools(const LabeledSet& retrieved, const FewShotSplit& fewshot);

// Retrieved rows plus few-shot rows repeated (whole passes, then a seeded
// partial pass) until they make up `ratio` of the result, rounded to the
// nearest row. ratio must lie in (0, 1) and the retrieved set be non-empty.
LabeledSet mix_pools_with_ratio(const LabeledSet& retrieved, const FewShotSplit& fewshot, double ratio,
                                std::uint64_t seed);

// Fraction of kFewShot rows; 0 for an empty set.
double few_shot_fraction(const LabeledSet& set);

}  // namespace swat::datasets
