#pragma once

#include <cstdint>

#include "swat/core/json_io.hpp"
#include "swat/datasets/synthetic.hpp"
#include "swat/model/model.hpp"

namespace swat::model {

// Regression pretrain that gives synthetic-task encoders a non-random start.
struct PretrainConfig {
  int hidden_dim = 256;
  int examples = 4096;
  int epochs = 20;
  int batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
  Json to_json() const;
  static PretrainConfig from_json(const Json& j, const std::string& where = "pretrain");
};

// Fits encoder(x) ~ targets with mean squared error and Adam. Returns the
// final epoch's mean loss.
double pretrain_regression(Encoder& encoder, const Matrix& inputs, const Matrix& targets, const PretrainConfig& cfg);

// MLP encoder pretrained to reproduce its input on a synthetic task drawn
// with an unrelated seed (disjoint classes and samples), plus a head
// initialized from the task's prompt embeddings.
Model pretrained_synthetic_model(const datasets::SyntheticTaskSpec& task, const PretrainConfig& cfg,
                                 double temperature_init = 0.01);

}  // namespace swat::model
