#pragma once

#include <cstdint>
#include <string>

#include "swat/augmentation/msda.hpp"
#include "swat/core/json_io.hpp"

namespace swat::training {

// Optimization recipe shared by every task. Defaults are the published
// two-stage recipe.
struct TrainConfig {
  double lr_encoder = 1e-6;
  double lr_head = 1e-4;
  double lr_temperature = 1e-4;
  double weight_decay = 1e-2;
  int batch_size = 32;
  int warmup_iters = 50;
  int epochs_stage1 = 50;
  int epochs_stage2 = 10;
  double temperature_init = 0.01;
  double temperature_stage2 = 0.01;
  augmentation::MsdaConfig msda;
  std::uint64_t seed = 0;

  // Rates must be finite and >= 0 (0 freezes a group); epochs, batch >= 1.
  void validate() const;
  Json to_json() const;
  // Missing keys keep defaults; unknown keys throw naming "<where>.<key>".
  static TrainConfig from_json(const Json& j, const std::string& where = "train");
};

// Parses the msda block ({method, alpha, prob, per_batch}); same key rules.
augmentation::MsdaConfig msda_from_json(const Json& j, const std::string& where = "msda");

}  // namespace swat::training
