#include "swat/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "swat/augmentation/msda.hpp"
#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/rng.hpp"
#include "swat/training/optimizer.hpp"

namespace swat::training {

namespace {

enum RngStream : std::uint64_t { kStage1Stream = 11, kStage2Stream = 12, kProbeStream = 13 };

}  // namespace

Json TrainingLog::to_json() const {
  return Json{{"stage", stage},
              {"iterations", iterations},
              {"epoch_loss", epoch_loss},
              {"epoch_test_acc", epoch_test_acc},
              {"checkpoint", checkpoint}};
}

TrainResult finetune(model::Model model, const datasets::LabeledSet& data, const TrainConfig& cfg,
                     const FinetunePlan& plan, const EpochMonitor& monitor) {
  cfg.validate();
  if (plan.epochs < 1) throw InvalidArgument(plan.name + ": epochs must be >= 1");
  if (data.is_empty()) throw InvalidArgument(plan.name + ": training data is empty");
  data.validate();
  if (data.num_classes() != model.head().num_classes()) {
    throw InvalidArgument(plan.name + ": data has " + std::to_string(data.num_classes()) + " classes, head has " +
                          std::to_string(model.head().num_classes()));
  }
  const auto start = std::chrono::steady_clock::now();
  if (plan.fixed_temperature) model.head().log_temperature = std::log(*plan.fixed_temperature);

  const int N = static_cast<int>(data.size());
  const int B = cfg.batch_size;
  const int iters_per_epoch = (N + B - 1) / B;
  const int total = iters_per_epoch * plan.epochs;
  const WarmupCosineSchedule enc_sched{cfg.lr_encoder, cfg.warmup_iters, total};
  const WarmupCosineSchedule head_sched{cfg.lr_head, cfg.warmup_iters, total};
  const WarmupCosineSchedule tau_sched{cfg.lr_temperature, cfg.warmup_iters, total};
  AdamW enc_opt;
  AdamW head_opt;
  AdamW tau_opt;

  // A frozen encoder is evaluated once; batches then only touch the head.
  const bool frozen = !plan.train_encoder;
  const bool augment = plan.use_msda && cfg.msda.method != augmentation::MsdaMethod::kNone;
  if (frozen && augment) throw InvalidArgument(plan.name + ": MSDA requires a trainable encoder");
  Matrix cached_features;
  if (frozen) cached_features = model.features(data.inputs);
  const Matrix& rows_source = frozen ? cached_features : data.inputs;

  const model::GradientMask mask{plan.train_encoder, plan.train_head, plan.train_temperature};
  Rng rng(mix_seed(cfg.seed, plan.rng_stream));
  TrainingLog log;
  log.stage = plan.name;
  int step = 0;
  for (int epoch = 0; epoch < plan.epochs; ++epoch) {
    const auto order = random_permutation(rng, N);
    double epoch_sum = 0.0;
    for (int it = 0; it < iters_per_epoch; ++it) {
      const int lo = it * B;
      const int n = std::min(B, N - lo);
      augmentation::Batch batch;
      batch.shape = data.shape;
      batch.num_classes = data.num_classes();
      batch.inputs.resize(n, rows_source.cols());
      for (int i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(order[static_cast<std::size_t>(lo + i)]);
        batch.inputs.row(i) = rows_source.row(static_cast<Eigen::Index>(row));
        batch.labels.push_back(data.labels[row]);
        batch.sources.push_back(data.sources[row]);
      }
      if (frozen) batch.shape = InputShape::features(static_cast<int>(cached_features.cols()));
      const augmentation::MixedBatch mixed =
          augment ? augmentation::apply_msda(batch, cfg.msda, rng) : augmentation::passthrough(batch);

      model::Gradients grads;
      double loss = 0.0;
      if (frozen) {
        loss = model::head_loss_and_gradients(mixed.inputs, model.head(), mixed.labels,
                                              plan.train_head ? &grads.head : nullptr,
                                              plan.train_temperature ? &grads.log_temperature : nullptr, nullptr);
      } else {
        loss = model::loss_and_gradients(model, mixed.inputs, mixed.labels, &grads, mask);
      }
      if (!std::isfinite(loss)) {
        throw NumericError(plan.name + ": non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                           std::to_string(it + 1) + " (temperature " +
                           std::to_string(std::exp(model.head().log_temperature)) + ")");
      }
      epoch_sum += loss;
      log.batch_loss.push_back(loss);

      if (plan.train_encoder) {
        auto params = model.encoder().parameters();
        enc_opt.step(params, grads.encoder, enc_sched.at(step), cfg.weight_decay);
      }
      if (plan.train_head) {
        Matrix* head_params[] = {&model.head().weights};
        const Matrix head_grads[] = {grads.head};
        head_opt.step(head_params, head_grads, head_sched.at(step), cfg.weight_decay);
      }
      if (plan.train_temperature) {
        Matrix tau(1, 1);
        tau(0, 0) = model.head().log_temperature;
        Matrix* tau_params[] = {&tau};
        Matrix tau_grad(1, 1);
        tau_grad(0, 0) = grads.log_temperature;
        const Matrix tau_grads[] = {tau_grad};
        tau_opt.step(tau_params, tau_grads, tau_sched.at(step), 0.0);
        model.head().log_temperature = tau(0, 0);
      }
      ++step;
    }
    log.epoch_loss.push_back(epoch_sum / iters_per_epoch);
    if (monitor) {
      if (auto acc = monitor(epoch + 1, model)) log.epoch_test_acc.push_back(*acc);
    }
  }
  log.iterations = step;
  model.set_stage(plan.result_stage);
  log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(model), std::move(log)};
}

TrainResult stage1_finetune(model::Model model, const datasets::LabeledSet& mixed, const TrainConfig& cfg,
                            const EpochMonitor& monitor) {
  FinetunePlan plan;
  plan.name = "stage1";
  plan.epochs = cfg.epochs_stage1;
  plan.result_stage = model::Stage::kStage1;
  plan.rng_stream = kStage1Stream;
  return finetune(std::move(model), mixed, cfg, plan, monitor);
}

TrainResult fsft(model::Model model, const datasets::FewShotSplit& fewshot, const TrainConfig& cfg,
                 const EpochMonitor& monitor) {
  const auto data = datasets::mix_pools(datasets::LabeledSet::empty(fewshot.examples.shape, {}), fewshot);
  return stage1_finetune(std::move(model), data, cfg, monitor);
}

namespace {

void require_stage1(const model::Model& model, const char* op) {
  if (model.stage() != model::Stage::kStage1) {
    throw InvalidArgument(std::string(op) + " expects a stage1 model, got '" +
                          std::string(model::to_string(model.stage())) + "'");
  }
}

}  // namespace

TrainResult stage2_retrain_classifier(model::Model model, const datasets::FewShotSplit& fewshot,
                                      const TrainConfig& cfg, const EpochMonitor& monitor) {
  require_stage1(model, "stage2_retrain_classifier");
  FinetunePlan plan;
  plan.name = "stage2";
  plan.epochs = cfg.epochs_stage2;
  plan.train_encoder = false;
  plan.train_temperature = false;
  plan.fixed_temperature = cfg.temperature_stage2;
  plan.use_msda = false;
  plan.result_stage = model::Stage::kStage2;
  plan.rng_stream = kStage2Stream;
  return finetune(std::move(model), fewshot.examples, cfg, plan, monitor);
}

TrainResult stage2_finetune_all(model::Model model, const datasets::FewShotSplit& fewshot, const TrainConfig& cfg,
                                const EpochMonitor& monitor) {
  require_stage1(model, "stage2_finetune_all");
  FinetunePlan plan;
  plan.name = "stage2_all";
  plan.epochs = cfg.epochs_stage2;
  plan.train_encoder = true;
  plan.train_temperature = false;
  plan.fixed_temperature = cfg.temperature_stage2;
  plan.use_msda = false;
  plan.result_stage = model::Stage::kStage2;
  plan.rng_stream = kStage2Stream;
  return finetune(std::move(model), fewshot.examples, cfg, plan, monitor);
}

TrainResult linear_probe(model::Model model, const datasets::FewShotSplit& fewshot, const TrainConfig& cfg,
                         const EpochMonitor& monitor) {
  FinetunePlan plan;
  plan.name = "linear_probe";
  plan.epochs = cfg.epochs_stage1;
  plan.train_encoder = false;
  plan.train_temperature = true;
  plan.use_msda = false;
  plan.result_stage = model::Stage::kStage1;
  plan.rng_stream = kProbeStream;
  return finetune(std::move(model), fewshot.examples, cfg, plan, monitor);
}

SwatResult run_swat(model::Model model, const datasets::LabeledSet& retrieved, const datasets::FewShotSplit& fewshot,
                    const TrainConfig& cfg) {
  const auto mixed = datasets::mix_pools(retrieved, fewshot);
  auto stage1 = stage1_finetune(std::move(model), mixed, cfg);
  auto stage2 = stage2_retrain_classifier(stage1.model, fewshot, cfg);
  return {std::move(stage1.model), std::move(stage2.model), std::move(stage1.log), std::move(stage2.log)};
}

}  // namespace swat::training
