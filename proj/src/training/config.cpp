#include "swat/training/config.hpp"

#include <cmath>
#include <set>

#include "swat/core/error.hpp"
#include "swat/core/json_keys.hpp"

namespace swat::training {

namespace {

void check_rate(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string("train.") + name + " must be finite and >= 0");
  }
}

}  // namespace

void TrainConfig::validate() const {
  check_rate(lr_encoder, "lr_encoder");
  check_rate(lr_head, "lr_head");
  check_rate(lr_temperature, "lr_temperature");
  check_rate(weight_decay, "weight_decay");
  if (batch_size < 1) throw InvalidArgument("train.batch_size must be >= 1");
  if (warmup_iters < 0) throw InvalidArgument("train.warmup_iters must be >= 0");
  if (epochs_stage1 < 1) throw InvalidArgument("train.epochs_stage1 must be >= 1");
  if (epochs_stage2 < 1) throw InvalidArgument("train.epochs_stage2 must be >= 1");
  if (!(temperature_init > 0.0)) throw InvalidArgument("train.temperature_init must be > 0");
  if (!(temperature_stage2 > 0.0)) throw InvalidArgument("train.temperature_stage2 must be > 0");
  msda.validate();
}

Json TrainConfig::to_json() const {
  return Json{{"lr_encoder", lr_encoder},
              {"lr_head", lr_head},
              {"lr_temperature", lr_temperature},
              {"weight_decay", weight_decay},
              {"batch_size", batch_size},
              {"warmup_iters", warmup_iters},
              {"epochs_stage1", epochs_stage1},
              {"epochs_stage2", epochs_stage2},
              {"temperature_init", temperature_init},
              {"temperature_stage2", temperature_stage2},
              {"msda", msda.to_json()},
              {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const Json& j, const std::string& where) {
  TrainConfig c;
  if (j.is_null()) return c;
  reject_unknown_keys(j,
                 {"lr_encoder", "lr_head", "lr_temperature", "weight_decay", "batch_size", "warmup_iters",
                  "epochs_stage1", "epochs_stage2", "temperature_init", "temperature_stage2", "msda", "seed"},
                 where);
  read_key(j, "lr_encoder", c.lr_encoder, where);
  read_key(j, "lr_head", c.lr_head, where);
  read_key(j, "lr_temperature", c.lr_temperature, where);
  read_key(j, "weight_decay", c.weight_decay, where);
  read_key(j, "batch_size", c.batch_size, where);
  read_key(j, "warmup_iters", c.warmup_iters, where);
  read_key(j, "epochs_stage1", c.epochs_stage1, where);
  read_key(j, "epochs_stage2", c.epochs_stage2, where);
  read_key(j, "temperature_init", c.temperature_init, where);
  read_key(j, "temperature_stage2", c.temperature_stage2, where);
  read_key(j, "seed", c.seed, where);
  if (j.contains("msda")) c.msda = msda_from_json(j.at("msda"), where + ".msda");
  c.validate();
  return c;
}

augmentation::MsdaConfig msda_from_json(const Json& j, const std::string& where) {
  augmentation::MsdaConfig m;
  if (j.is_null()) return m;
  reject_unknown_keys(j, {"method", "alpha", "prob", "per_batch"}, where);
  if (j.contains("method")) {
    if (!j.at("method").is_string()) throw InvalidArgument("config key '" + where + ".method' must be a string");
    m.method = augmentation::parse_msda_method(j.at("method").get<std::string>());
  }
  read_key(j, "alpha", m.alpha, where);
  read_key(j, "prob", m.prob, where);
  read_key(j, "per_batch", m.per_batch, where);
  m.validate();
  return m;
}

}  // namespace swat::training
