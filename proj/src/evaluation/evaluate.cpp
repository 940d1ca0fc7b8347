#include "swat/evaluation/evaluate.hpp"

#include <cmath>
#include <limits>

#include "swat/core/error.hpp"

namespace swat::evaluation {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

double macro(const std::vector<int>& classes, const EvalReport& r) {
  double sum = 0.0;
  int n = 0;
  for (int c : classes) {
    if (r.per_class_count[static_cast<std::size_t>(c)] == 0) continue;
    sum += r.per_class_acc[static_cast<std::size_t>(c)];
    ++n;
  }
  return n == 0 ? kNaN : sum / n;
}

}  // namespace

Json EvalReport::to_json() const {
  Json per_class = Json::array();
  for (double v : per_class_acc) per_class.push_back(number_or_null(v));
  return Json{{"overall_acc", overall_acc},
              {"common_acc", number_or_null(common_acc)},
              {"rare_acc", number_or_null(rare_acc)},
              {"averaging", {{"overall", "micro"}, {"common", "macro"}, {"rare", "macro"}}},
              {"n_test", n_test},
              {"rare_classes", split.rare},
              {"per_class_acc", per_class},
              {"per_class_count", per_class_count}};
}

EvalReport evaluate_predictions(std::span<const int> predictions, std::span<const int> labels, int num_classes,
                                const datasets::CommonRareSplit& split) {
  if (labels.empty()) throw InvalidArgument("evaluation on an empty test set");
  if (predictions.size() != labels.size()) throw InvalidArgument("one prediction per test example required");
  if (split.num_classes() != num_classes) {
    throw InvalidArgument("common/rare split covers " + std::to_string(split.num_classes()) + " classes, expected " +
                          std::to_string(num_classes));
  }
  EvalReport r;
  r.split = split;
  r.n_test = static_cast<int>(labels.size());
  std::vector<int> correct(static_cast<std::size_t>(num_classes), 0);
  r.per_class_count.assign(static_cast<std::size_t>(num_classes), 0);
  int total_correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= num_classes) throw InvalidArgument("test label " + std::to_string(y) + " out of range");
    ++r.per_class_count[static_cast<std::size_t>(y)];
    if (predictions[i] == y) {
      ++correct[static_cast<std::size_t>(y)];
      ++total_correct;
    }
  }
  r.per_class_acc.resize(static_cast<std::size_t>(num_classes));
  for (std::size_t c = 0; c < correct.size(); ++c) {
    r.per_class_acc[c] = r.per_class_count[c] == 0 ? kNaN : 100.0 * correct[c] / r.per_class_count[c];
  }
  r.overall_acc = 100.0 * total_correct / r.n_test;
  r.common_acc = macro(split.common, r);
  r.rare_acc = macro(split.rare, r);
  return r;
}

EvalReport evaluate(const model::Model& model, const datasets::LabeledSet& test,
                    const datasets::CommonRareSplit& split) {
  if (test.is_empty()) throw InvalidArgument("evaluation on an empty test set");
  test.validate();
  const auto predictions = model.predict(test.inputs);
  return evaluate_predictions(predictions, test.labels, test.num_classes(), split);
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean of an empty list");
  MeanStd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace swat::evaluation
