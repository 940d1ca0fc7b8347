#include "swat/datasets/few_shot.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "swat/core/error.hpp"
#include "swat/core/rng.hpp"

namespace swat::datasets {

FewShotSplit sample_few_shot(const LabeledSet& pool, int shots, std::uint64_t seed) {
  if (shots < 1) throw InvalidArgument("shots must be >= 1, got " + std::to_string(shots));
  pool.validate();
  const auto by_class = pool.rows_by_class();
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (static_cast<int>(by_class[c].size()) < shots) {
      throw InvalidArgument("class '" + pool.class_names[c] + "' has " + std::to_string(by_class[c].size()) +
                            " examples, " + std::to_string(shots) + " shots requested");
    }
  }
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(by_class.size() * static_cast<std::size_t>(shots));
  for (auto rows : by_class) {
    // Partial Fisher-Yates: the first `shots` slots form the sample.
    for (int i = 0; i < shots; ++i) {
      const int j = uniform_int(rng, i, static_cast<int>(rows.size()) - 1);
      std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
      chosen.push_back(rows[static_cast<std::size_t>(i)]);
    }
  }
  FewShotSplit split;
  split.shots = shots;
  split.seed = seed;
  split.examples = pool.subset(chosen);
  std::fill(split.examples.sources.begin(), split.examples.sources.end(), Source::kFewShot);
  return split;
}

Json FewShotSplit::to_json() const {
  Json ids = Json::object();
  for (const auto& name : examples.class_names) ids[name] = Json::array();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    ids[examples.class_names[static_cast<std::size_t>(examples.labels[i])]].push_back(examples.ids[i]);
  }
  return Json{{"seed", seed}, {"shots", shots}, {"ids", ids}};
}

FewShotSplit FewShotSplit::from_json(const Json& j, const LabeledSet& pool) {
  FewShotSplit split;
  split.seed = j.at("seed").get<std::uint64_t>();
  split.shots = j.at("shots").get<int>();
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < pool.size(); ++i) row_of.emplace(pool.ids[i], i);
  std::vector<std::size_t> rows;
  for (const auto& name : pool.class_names) {
    const auto& list = j.at("ids").at(name);
    if (static_cast<int>(list.size()) != split.shots) {
      throw InvalidArgument("persisted split lists " + std::to_string(list.size()) + " ids for '" + name + "'");
    }
    for (const auto& id : list) {
      auto it = row_of.find(id.get<std::string>());
      if (it == row_of.end()) throw InvalidArgument("persisted split id '" + id.get<std::string>() + "' not in pool");
      rows.push_back(it->second);
    }
  }
  split.examples = pool.subset(rows);
  std::fill(split.examples.sources.begin(), split.examples.sources.end(), Source::kFewShot);
  return split;
}

LabeledSet mix_pools(const LabeledSet& retrieved, const FewShotSplit& fewshot) {
  const LabeledSet& fs = fewshot.examples;
  if (retrieved.is_empty()) {
    if (!retrieved.class_names.empty() && retrieved.class_names != fs.class_names) {
      throw InvalidArgument("retrieved and few-shot pools use different concept vocabularies");
    }
    return fs;
  }
  if (retrieved.class_names != fs.class_names) {
    throw InvalidArgument("retrieved and few-shot pools use different concept vocabularies");
  }
  if (!fs.is_empty() && retrieved.shape != fs.shape) {
    throw InvalidArgument("retrieved and few-shot inputs have different shapes");
  }
  LabeledSet out = LabeledSet::empty(retrieved.shape, retrieved.class_names);
  out.inputs.resize(static_cast<Eigen::Index>(retrieved.size() + fs.size()), retrieved.shape.size());
  out.inputs.topRows(static_cast<Eigen::Index>(retrieved.size())) = retrieved.inputs;
  if (!fs.is_empty()) out.inputs.bottomRows(static_cast<Eigen::Index>(fs.size())) = fs.inputs;
  for (const LabeledSet* part : {&retrieved, &fs}) {
    out.labels.insert(out.labels.end(), part->labels.begin(), part->labels.end());
    out.sources.insert(out.sources.end(), part->sources.begin(), part->sources.end());
    out.ids.insert(out.ids.end(), part->ids.begin(), part->ids.end());
  }
  return out;
}

LabeledSet mix_pools_with_ratio(const LabeledSet& retrieved, const FewShotSplit& fewshot, double ratio,
                                std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("few-shot ratio must lie in (0, 1)");
  if (retrieved.is_empty()) throw InvalidArgument("few-shot ratio needs a non-empty retrieved set");
  const std::size_t F = fewshot.examples.size();
  if (F == 0) throw InvalidArgument("few-shot ratio needs few-shot examples");
  const double R = static_cast<double>(retrieved.size());
  const auto wanted = static_cast<std::size_t>(std::max(1.0, std::round(ratio * R / (1.0 - ratio))));
  std::vector<std::size_t> rows;
  rows.reserve(wanted);
  for (std::size_t pass = 0; pass < wanted / F; ++pass) {
    for (std::size_t i = 0; i < F; ++i) rows.push_back(i);
  }
  Rng rng(seed);
  const auto perm = random_permutation(rng, static_cast<int>(F));
  for (std::size_t i = 0; rows.size() < wanted; ++i) rows.push_back(static_cast<std::size_t>(perm[i]));
  FewShotSplit repeated = fewshot;
  repeated.examples = fewshot.examples.subset(rows);
  return mix_pools(retrieved, repeated);
}

double few_shot_fraction(const LabeledSet& set) {
  if (set.is_empty()) return 0.0;
  return static_cast<double>(set.count_source(Source::kFewShot)) / static_cast<double>(set.size());
}

}  // namespace swat::datasets
