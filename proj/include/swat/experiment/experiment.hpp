#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "swat/datasets/common_rare.hpp"
#include "swat/datasets/few_shot.hpp"
#include "swat/evaluation/curve.hpp"
#include "swat/evaluation/domain_gap.hpp"
#include "swat/evaluation/evaluate.hpp"
#include "swat/experiment/experiment_config.hpp"
#include "swat/model/model.hpp"
#include "swat/retrieval/embedder.hpp"
#include "swat/training/trainer.hpp"

namespace swat::experiment {

inline constexpr int kReportSchemaVersion = 1;

// Everything a run needs that does not depend on the seed, plus the
// retrieval step (which may depend on the seed's few-shot split).
class PreparedTask {
 public:
  static PreparedTask prepare(const ExperimentConfig& cfg);

  const retrieval::ConceptVocabulary& vocab() const;
  const datasets::LabeledSet& train_pool() const;
  const datasets::LabeledSet& test() const;
  const model::Model& base_model() const;
  const retrieval::TextImageEmbedder& embedder() const;
  // Partition by the number of retrieved examples per concept.
  const datasets::CommonRareSplit& split() const;
  const retrieval::ImbalanceStats& retrieval_stats() const;

  datasets::FewShotSplit few_shot(std::uint64_t seed) const;
  // Retrieved training examples (top k per concept). Corpus tasks rank with
  // the configured method; image-based methods use the few-shot split.
  datasets::LabeledSet retrieved(const datasets::FewShotSplit& fewshot, std::uint64_t seed) const;
  // Corpus tasks only.
  retrieval::RetrievedPool retrieved_pool(const datasets::FewShotSplit& fewshot, std::uint64_t seed) const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

struct SeedRun {
  std::uint64_t seed = 0;
  evaluation::EvalReport report;
  std::optional<evaluation::EvalReport> stage1_report;  // two-stage methods
  std::vector<training::TrainingLog> logs;
  std::optional<model::Model> stage1_model;
  model::Model final_model;
  datasets::FewShotSplit fewshot;
  double wall_seconds = 0.0;

  Json report_json(Method method) const;
};

struct ExperimentResult {
  std::vector<SeedRun> runs;
  Json aggregate;
  std::optional<evaluation::CurveSeries> curve;
};

struct RunOptions {
  bool write_outputs = true;
  std::size_t max_threads = 1;  // seeds and curve cells
};

// Runs cfg.method for every seed, aggregates mean/std in seed order and
// (optionally) writes the output tree under cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

// Same, on an already prepared task.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const PreparedTask& task, const RunOptions& options);

// Trains one seed of cfg.method.
SeedRun run_seed(const ExperimentConfig& cfg, const PreparedTask& task, std::uint64_t seed);

// Mean/std of every metric over runs, in order.
Json aggregate_runs(const ExperimentConfig& cfg, const std::vector<SeedRun>& runs);

// Held-out accuracy of telling retrieved from downstream training examples
// by their embedder image features, one value per seed.
std::vector<evaluation::ProbeResult> probe_domain_gap(const ExperimentConfig& cfg, const PreparedTask& task);

}  // namespace swat::experiment
