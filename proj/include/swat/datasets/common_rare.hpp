#pragma once

#include <span>
#include <vector>

namespace swat::datasets {

// rare: the ceil(C/10) classes with the fewest retrieved examples, ties
// broken by ascending class index; common: the rest. Both sorted ascending.
struct CommonRareSplit {
  std::vector<int> rare;
  std::vector<int> common;

  bool is_rare(int c) const;
  int num_classes() const { return static_cast<int>(rare.size() + common.size()); }
};

CommonRareSplit split_common_rare(std::span<const int> retrieved_counts);

}  // namespace swat::datasets
