#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/datasets/synthetic.hpp"
#include "swat/evaluation/domain_gap.hpp"
#include "swat/model/pretrain.hpp"
#include "swat/retrieval/ranking.hpp"
#include "swat/training/config.hpp"

namespace swat::experiment {

enum class Method { kZeroShotHead, kLinearProbe, kFsft, kSwat, kSwatPlus, kStage1Only };

Method parse_method(std::string_view text);
std::string_view to_string(Method method);

enum class TaskKind { kSynthetic, kFolder };

struct TaskConfig {
  TaskKind kind = TaskKind::kSynthetic;
  datasets::SyntheticTaskSpec synthetic;
  model::PretrainConfig pretrain;  // synthetic tasks only
  // Folder tasks: <dir>/<concept>/*.pgm|ppm and a concept vocabulary.
  std::filesystem::path train_dir;
  std::filesystem::path test_dir;
  std::filesystem::path vocab;
  int shots = 16;
};

struct RetrievalConfig {
  std::filesystem::path corpus;  // folder tasks only
  retrieval::RankMethod method = retrieval::RankMethod::kT2T;
  int k = 100;
  std::optional<double> t2i_threshold;
  bool retrieved_only = false;          // stage 1 trains on retrieved data without the few-shot split
  std::optional<double> fewshot_ratio;  // resample few-shot rows to this batch fraction
};

// Encoder and embedder for folder tasks.
struct ModelConfig {
  int embed_dim = 64;
  std::uint64_t embedder_seed = 0;
  int filters = 16;
  std::optional<std::filesystem::path> checkpoint;  // start from these weights instead of a fresh init
};

struct EvalConfig {
  std::vector<int> curve_epochs;  // stage-2 epoch grid; empty disables the curve study
  bool monitor_test = false;      // log test accuracy after every epoch
  evaluation::ProbeConfig probe;
};

struct ExperimentConfig {
  Method method = Method::kSwat;
  TaskConfig task;
  RetrievalConfig retrieval;
  ModelConfig model;
  training::TrainConfig train;
  EvalConfig eval;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "runs/default";

  void validate() const;
  // Fully resolved tree with every default filled in.
  Json to_json() const;
  // Hash of the resolved tree without output_dir; stored in checkpoints.
  std::string hash() const;
  // Training keys that differ from the published recipe, as "key: value".
  std::vector<std::string> protocol_deviations() const;
};

// Unknown keys throw naming their dotted path. Relative input paths resolve
// against base_dir and must exist; output_dir is taken as given.
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace swat::experiment
