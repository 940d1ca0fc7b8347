#pragma once

#include <span>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/datasets/common_rare.hpp"
#include "swat/datasets/labeled_set.hpp"
#include "swat/model/model.hpp"

namespace swat::evaluation {

// Accuracies are percentages. overall is micro (correct / total); common and
// rare are macro averages of per-class accuracy within each subset, over
// classes that have test examples. A subset without test examples is NaN
// (null in JSON).
struct EvalReport {
  double overall_acc = 0.0;
  double common_acc = 0.0;
  double rare_acc = 0.0;
  std::vector<double> per_class_acc;
  std::vector<int> per_class_count;
  int n_test = 0;
  datasets::CommonRareSplit split;

  Json to_json() const;
};

EvalReport evaluate_predictions(std::span<const int> predictions, std::span<const int> labels, int num_classes,
                                const datasets::CommonRareSplit& split);

EvalReport evaluate(const model::Model& model, const datasets::LabeledSet& test,
                    const datasets::CommonRareSplit& split);

// Mean and sample standard deviation (0 for a single value).
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
MeanStd mean_std(std::span<const double> values);

}  // namespace swat::evaluation
