#pragma once

#include <string>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/experiment/experiment.hpp"

namespace swat::experiment {

enum class SweepAxis { kRetrievalK, kFewShotRatio, kStage1Epochs, kMsdaMethod };

SweepAxis parse_sweep_axis(std::string_view text);
std::string_view to_string(SweepAxis axis);

struct SweepRow {
  std::string value;
  Json aggregate;
};

struct SweepResult {
  SweepAxis axis;
  std::vector<SweepRow> rows;

  Json to_json() const;
  // value, overall/common/rare mean and std, one row per value.
  std::string to_csv() const;
  // Numeric axes only: overall mean per value, its change from the previous
  // row and that change per unit of the axis.
  std::string trend_csv() const;
};

// Copy of cfg with the axis set to `value` (a JSON scalar) and output_dir
// moved to <output_dir>/<axis>_<value>.
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepAxis axis, const Json& value);

// One run_experiment per value, in order; writes sweep.json, sweep.csv and
// sweep.svg under cfg.output_dir. Throws on an empty value list.
SweepResult sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<Json>& values,
                  const RunOptions& options = {});

}  // namespace swat::experiment
