#pragma once

#include <span>
#include <string>
#include <vector>

#include "swat/core/types.hpp"
#include "swat/retrieval/corpus_index.hpp"
#include "swat/retrieval/ranking.hpp"

namespace swat::datasets {

// Column-aligned examples: row i of `inputs` has labels[i], sources[i], ids[i].
struct LabeledSet {
  InputShape shape;
  std::vector<std::string> class_names;
  Matrix inputs;
  std::vector<int> labels;
  std::vector<Source> sources;
  std::vector<std::string> ids;

  static LabeledSet empty(InputShape shape, std::vector<std::string> class_names);

  std::size_t size() const { return labels.size(); }
  bool is_empty() const { return labels.empty(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }

  // Throws when columns disagree in length or a label is out of range.
  void validate() const;

  LabeledSet subset(std::span<const std::size_t> rows) const;
  std::vector<int> class_counts() const;
  std::vector<std::vector<std::size_t>> rows_by_class() const;
  std::size_t count_source(Source s) const;
};

// Builds the retrieved training set from a selected pool; every example is
// tagged kRetrieved and labeled with its concept.
LabeledSet labeled_set_from_pool(const retrieval::RetrievedPool& pool, const retrieval::CorpusIndex& index,
                                 const std::vector<std::string>& class_names);

}  // namespace swat::datasets
