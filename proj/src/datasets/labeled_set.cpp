#include "swat/datasets/labeled_set.hpp"

#include "swat/core/error.hpp"

namespace swat::datasets {

LabeledSet LabeledSet::empty(InputShape shape, std::vector<std::string> class_names) {
  LabeledSet s;
  s.shape = shape;
  s.class_names = std::move(class_names);
  s.inputs.resize(0, shape.size());
  return s;
}

void LabeledSet::validate() const {
  const auto n = labels.size();
  if (static_cast<std::size_t>(inputs.rows()) != n || sources.size() != n || ids.size() != n) {
    throw InvalidArgument("labeled set columns have inconsistent lengths");
  }
  if (n > 0 && inputs.cols() != shape.size()) {
    throw InvalidArgument("labeled set inputs have " + std::to_string(inputs.cols()) + " columns, shape needs " +
                          std::to_string(shape.size()));
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes()) throw InvalidArgument("label " + std::to_string(y) + " out of range");
  }
}

LabeledSet LabeledSet::subset(std::span<const std::size_t> rows) const {
  LabeledSet out = empty(shape, class_names);
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), shape.size());
  out.labels.reserve(rows.size());
  out.sources.reserve(rows.size());
  out.ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    out.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(static_cast<Eigen::Index>(r));
    out.labels.push_back(labels[r]);
    out.sources.push_back(sources[r]);
    out.ids.push_back(ids[r]);
  }
  return out;
}

std::vector<int> LabeledSet::class_counts() const {
  std::vector<int> counts(class_names.size(), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

std::vector<std::vector<std::size_t>> LabeledSet::rows_by_class() const {
  std::vector<std::vector<std::size_t>> rows(class_names.size());
  for (std::size_t i = 0; i < labels.size(); ++i) rows[static_cast<std::size_t>(labels[i])].push_back(i);
  return rows;
}

std::size_t LabeledSet::count_source(Source s) const {
  std::size_t n = 0;
  for (Source x : sources) n += (x == s);
  return n;
}

LabeledSet labeled_set_from_pool(const retrieval::RetrievedPool& pool, const retrieval::CorpusIndex& index,
                                 const std::vector<std::string>& class_names) {
  if (pool.per_concept.size() != class_names.size()) {
    throw InvalidArgument("retrieved pool covers " + std::to_string(pool.per_concept.size()) +
                          " concepts, expected " + std::to_string(class_names.size()));
  }
  std::vector<std::size_t> records;
  std::vector<int> labels;
  for (std::size_t c = 0; c < pool.per_concept.size(); ++c) {
    if (pool.per_concept[c].concept_name != class_names[c]) {
      throw InvalidArgument("retrieved pool concept '" + pool.per_concept[c].concept_name +
                            "' does not match class '" + class_names[c] + "'");
    }
    for (const auto& cand : pool.per_concept[c].items) {
      records.push_back(cand.record);
      labels.push_back(static_cast<int>(c));
    }
  }
  if (records.empty()) return LabeledSet::empty(InputShape{}, class_names);
  const InputShape shape = retrieval::payload_shape(index.record(records.front()));
  LabeledSet out = LabeledSet::empty(shape, class_names);
  out.inputs.resize(static_cast<Eigen::Index>(records.size()), shape.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = index.record(records[i]);
    const Vector payload = retrieval::load_payload(rec);
    if (payload.size() != shape.size()) {
      throw InvalidArgument("record '" + rec.id + "' payload size " + std::to_string(payload.size()) +
                            " differs from " + std::to_string(shape.size()));
    }
    out.inputs.row(static_cast<Eigen::Index>(i)) = payload.transpose();
    out.labels.push_back(labels[i]);
    out.sources.push_back(Source::kRetrieved);
    out.ids.push_back(rec.id);
  }
  return out;
}

}  // namespace swat::datasets
