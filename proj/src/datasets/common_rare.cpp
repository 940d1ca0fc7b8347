#include "swat/datasets/common_rare.hpp"

#include <algorithm>
#include <numeric>

namespace swat::datasets {

bool CommonRareSplit::is_rare(int c) const { return std::binary_search(rare.begin(), rare.end(), c); }

CommonRareSplit split_common_rare(std::span<const int> retrieved_counts) {
  const int n = static_cast<int>(retrieved_counts.size());
  // ceil(0.1 n) in integers; 0.1 * n in floating point overshoots for n = 200.
  const int n_rare = (n + 9) / 10;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return retrieved_counts[static_cast<std::size_t>(a)] < retrieved_counts[static_cast<std::size_t>(b)];
  });
  CommonRareSplit split;
  split.rare.assign(order.begin(), order.begin() + n_rare);
  split.common.assign(order.begin() + n_rare, order.end());
  std::sort(split.rare.begin(), split.rare.end());
  std::sort(split.common.begin(), split.common.end());
  return split;
}

}  // namespace swat::datasets
