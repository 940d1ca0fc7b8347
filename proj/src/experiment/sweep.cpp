#include "swat/experiment/sweep.hpp"

#include <sstream>

#include "swat/core/error.hpp"
#include "swat/core/svg_plot.hpp"

namespace swat::experiment {

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "retrieval_k") return SweepAxis::kRetrievalK;
  if (text == "fewshot_ratio") return SweepAxis::kFewShotRatio;
  if (text == "stage1_epochs") return SweepAxis::kStage1Epochs;
  if (text == "msda_method") return SweepAxis::kMsdaMethod;
  throw InvalidArgument("unknown sweep axis '" + std::string(text) +
                        "' (retrieval_k, fewshot_ratio, stage1_epochs, msda_method)");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kRetrievalK: return "retrieval_k";
    case SweepAxis::kFewShotRatio: return "fewshot_ratio";
    case SweepAxis::kStage1Epochs: return "stage1_epochs";
    case SweepAxis::kMsdaMethod: return "msda_method";
  }
  return "?";
}

namespace {

std::string value_label(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

bool numeric_axis(SweepAxis axis) { return axis != SweepAxis::kMsdaMethod; }

template <typename T>
T scalar(const Json& v, SweepAxis axis) {
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    throw InvalidArgument("sweep value " + v.dump() + " has the wrong type for axis " + std::string(to_string(axis)));
  }
}

Json metric(const Json& aggregate, const char* name, const char* field) {
  return aggregate.at("metrics").at(name).at(field);
}

}  // namespace

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepAxis axis, const Json& value) {
  ExperimentConfig out = cfg;
  const bool stage1_method = cfg.method == Method::kSwat || cfg.method == Method::kSwatPlus ||
                             cfg.method == Method::kStage1Only;
  switch (axis) {
    case SweepAxis::kRetrievalK:
      if (!stage1_method) throw InvalidArgument("sweep axis retrieval_k needs a method that uses retrieved data");
      if (value.is_number_float()) throw InvalidArgument("retrieval_k must be an integer");
      out.retrieval.k = scalar<int>(value, axis);
      break;
    case SweepAxis::kFewShotRatio:
      if (!stage1_method) throw InvalidArgument("sweep axis fewshot_ratio needs a method that uses retrieved data");
      out.retrieval.fewshot_ratio = scalar<double>(value, axis);
      break;
    case SweepAxis::kStage1Epochs:
      if (cfg.method == Method::kZeroShotHead) throw InvalidArgument("sweep axis stage1_epochs needs a trained method");
      if (value.is_number_float()) throw InvalidArgument("stage1_epochs must be an integer");
      out.train.epochs_stage1 = scalar<int>(value, axis);
      break;
    case SweepAxis::kMsdaMethod:
      if (cfg.method == Method::kZeroShotHead || cfg.method == Method::kLinearProbe) {
        throw InvalidArgument("sweep axis msda_method needs a method that finetunes the encoder");
      }
      out.train.msda.method = augmentation::parse_msda_method(scalar<std::string>(value, axis));
      break;
  }
  out.output_dir = cfg.output_dir / (std::string(to_string(axis)) + "_" + value_label(value));
  out.validate();
  return out;
}

Json SweepResult::to_json() const {
  Json rows_json = Json::array();
  for (const auto& r : rows) rows_json.push_back(Json{{"value", r.value}, {"aggregate", r.aggregate}});
  return Json{{"schema_version", kReportSchemaVersion}, {"axis", to_string(axis)}, {"rows", rows_json}};
}

std::string SweepResult::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(axis) << ",overall_mean,overall_std,common_mean,common_std,rare_mean,rare_std\n";
  for (const auto& r : rows) {
    out << r.value;
    for (const char* name : {"overall_acc", "common_acc", "rare_acc"}) {
      for (const char* field : {"mean", "std"}) {
        const Json v = metric(r.aggregate, name, field);
        out << ",";
        if (!v.is_null()) out << v.get<double>();
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string SweepResult::trend_csv() const {
  if (!numeric_axis(axis)) throw InvalidArgument("trend needs a numeric sweep axis");
  std::ostringstream out;
  out.precision(17);
  out << to_string(axis) << ",overall_mean,delta,delta_per_unit\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double mean = metric(rows[i].aggregate, "overall_acc", "mean").get<double>();
    out << rows[i].value << "," << mean << ",";
    if (i > 0) {
      const double prev = metric(rows[i - 1].aggregate, "overall_acc", "mean").get<double>();
      const double step = std::stod(rows[i].value) - std::stod(rows[i - 1].value);
      out << mean - prev << "," << (mean - prev) / step;
    } else {
      out << ",";
    }
    out << "\n";
  }
  return out.str();
}

SweepResult sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<Json>& values,
                  const RunOptions& options) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  std::vector<ExperimentConfig> cells;
  for (const auto& v : values) cells.push_back(apply_sweep_value(cfg, axis, v));

  SweepResult result{axis, {}};
  // Only retrieval_k changes the prepared task (top-k and the common/rare split).
  const auto shared = PreparedTask::prepare(cfg);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto task = axis == SweepAxis::kRetrievalK ? PreparedTask::prepare(cells[i]) : shared;
    auto r = run_experiment(cells[i], task, options);
    result.rows.push_back({value_label(values[i]), std::move(r.aggregate)});
  }

  if (options.write_outputs) {
    write_json_file(cfg.output_dir / "sweep.json", result.to_json());
    write_text_file(cfg.output_dir / "sweep.csv", result.to_csv());
    if (numeric_axis(axis)) {
      PlotSpec spec{"Sweep over " + std::string(to_string(axis)), std::string(to_string(axis)), "accuracy (%)", {}};
      for (const char* name : {"overall_acc", "common_acc", "rare_acc"}) {
        PlotSeries s{name, {}, {}, {}};
        for (std::size_t i = 0; i < values.size(); ++i) {
          const Json mean = metric(result.rows[i].aggregate, name, "mean");
          if (mean.is_null()) continue;
          s.x.push_back(values[i].get<double>());
          s.y.push_back(mean.get<double>());
          s.err.push_back(metric(result.rows[i].aggregate, name, "std").get<double>());
        }
        spec.series.push_back(std::move(s));
      }
      write_svg(cfg.output_dir / "sweep.svg", spec);
      write_text_file(cfg.output_dir / "sweep_trend.csv", result.trend_csv());
    }
  }
  return result;
}

}  // namespace swat::experiment
