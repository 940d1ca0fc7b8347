#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/datasets/few_shot.hpp"
#include "swat/datasets/labeled_set.hpp"
#include "swat/model/model.hpp"
#include "swat/training/config.hpp"

namespace swat::training {

struct TrainingLog {
  std::string stage;
  std::vector<double> epoch_loss;      // mean batch loss per completed epoch
  std::vector<double> epoch_test_acc;  // filled only when a monitor is given
  std::vector<double> batch_loss;      // every iteration, in order
  int iterations = 0;
  double wall_seconds = 0.0;
  std::string checkpoint;

  // Timing is left out so that logs of identical runs compare equal.
  Json to_json() const;
};

struct TrainResult {
  model::Model model;
  TrainingLog log;
};

// Called after each epoch; a returned value is logged as that epoch's test
// accuracy.
using EpochMonitor = std::function<std::optional<double>(int epoch, const model::Model&)>;

// Which groups train, for how long, and whether MSDA runs.
struct FinetunePlan {
  std::string name;
  int epochs = 1;
  bool train_encoder = true;
  bool train_head = true;
  bool train_temperature = true;
  std::optional<double> fixed_temperature;
  bool use_msda = true;
  model::Stage result_stage = model::Stage::kStage1;
  std::uint64_t rng_stream = 0;
};

// Shared minibatch loop: per-epoch reshuffle from cfg.seed, no drop-last,
// soft-label cross entropy, AdamW per group with warmup + cosine schedule.
TrainResult finetune(model::Model model, const datasets::LabeledSet& data, const TrainConfig& cfg,
                     const FinetunePlan& plan, const EpochMonitor& monitor = {});

// End-to-end finetuning of encoder, head and temperature on mixed data.
TrainResult stage1_finetune(model::Model model, const datasets::LabeledSet& mixed, const TrainConfig& cfg,
                            const EpochMonitor& monitor = {});

// stage1_finetune on the few-shot examples alone.
TrainResult fsft(model::Model model, const datasets::FewShotSplit& fewshot, const TrainConfig& cfg,
                 const EpochMonitor& monitor = {});

// Classifier retraining on few-shot data: encoder frozen, temperature fixed,
// head initialized from the stage-1 head. Requires a stage-1 model.
TrainResult stage2_retrain_classifier(model::Model model, const datasets::FewShotSplit& fewshot,
                                      const TrainConfig& cfg, const EpochMonitor& monitor = {});

// Stage 2 that also finetunes the encoder (temperature still fixed).
TrainResult stage2_finetune_all(model::Model model, const datasets::FewShotSplit& fewshot, const TrainConfig& cfg,
                                const EpochMonitor& monitor = {});

// Frozen-encoder baseline: the cosine head alone is trained on the few-shot
// data for epochs_stage1 epochs, no MSDA.
TrainResult linear_probe(model::Model model, const datasets::FewShotSplit& fewshot, const TrainConfig& cfg,
                         const EpochMonitor& monitor = {});

struct SwatResult {
  model::Model stage1_model;
  model::Model final_model;
  TrainingLog stage1_log;
  TrainingLog stage2_log;
};

// mix_pools -> stage1_finetune -> stage2_retrain_classifier.
SwatResult run_swat(model::Model model, const datasets::LabeledSet& retrieved, const datasets::FewShotSplit& fewshot,
                    const TrainConfig& cfg);

}  // namespace swat::training
