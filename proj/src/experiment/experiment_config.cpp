#include "swat/experiment/experiment_config.hpp"

#include <set>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/json_keys.hpp"

namespace swat::experiment {

namespace fs = std::filesystem;

Method parse_method(std::string_view text) {
  if (text == "zeroshot_head") return Method::kZeroShotHead;
  if (text == "linear_probe") return Method::kLinearProbe;
  if (text == "fsft") return Method::kFsft;
  if (text == "swat") return Method::kSwat;
  if (text == "swat_plus") return Method::kSwatPlus;
  if (text == "stage1_only") return Method::kStage1Only;
  throw InvalidArgument("unknown method '" + std::string(text) +
                        "' (zeroshot_head, linear_probe, fsft, swat, swat_plus, stage1_only)");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kZeroShotHead: return "zeroshot_head";
    case Method::kLinearProbe: return "linear_probe";
    case Method::kFsft: return "fsft";
    case Method::kSwat: return "swat";
    case Method::kSwatPlus: return "swat_plus";
    case Method::kStage1Only: return "stage1_only";
  }
  return "?";
}

namespace {

fs::path existing_path(const Json& j, const char* key, const fs::path& base, const std::string& where) {
  std::string text;
  read_key(j, key, text, where);
  fs::path p = text;
  if (p.is_relative()) p = base / p;
  if (!fs::exists(p)) throw InvalidArgument("config key '" + key_path(where, key) + "': path '" + p.string() + "' does not exist");
  return p;
}

template <typename T>
T parse_enum(const Json& j, const char* key, const std::string& where, T (*parse)(std::string_view), T fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw InvalidArgument("config key '" + key_path(where, key) + "' must be a string");
  try {
    return parse(j.at(key).get<std::string>());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("config key '" + key_path(where, key) + "': " + e.what());
  }
}

TaskKind parse_task_kind(std::string_view text) {
  if (text == "synthetic") return TaskKind::kSynthetic;
  if (text == "folder") return TaskKind::kFolder;
  throw InvalidArgument("unknown task kind '" + std::string(text) + "' (synthetic, folder)");
}

TaskConfig task_from_json(const Json& j, const fs::path& base) {
  const std::string where = "task";
  TaskConfig t;
  if (j.is_null()) return t;
  reject_unknown_keys(j, {"kind", "synthetic", "pretrain", "train_dir", "test_dir", "vocab", "shots"}, where);
  t.kind = parse_enum(j, "kind", where, parse_task_kind, TaskKind::kSynthetic);
  read_key(j, "shots", t.shots, where);
  if (t.kind == TaskKind::kSynthetic) {
    for (const char* key : {"train_dir", "test_dir", "vocab"}) {
      if (j.contains(key)) throw InvalidArgument("config key 'task." + std::string(key) + "' needs task.kind = folder");
    }
    if (j.contains("synthetic")) t.synthetic = datasets::SyntheticTaskSpec::from_json(j.at("synthetic"), "task.synthetic");
    if (j.contains("pretrain")) t.pretrain = model::PretrainConfig::from_json(j.at("pretrain"), "task.pretrain");
  } else {
    for (const char* key : {"synthetic", "pretrain"}) {
      if (j.contains(key)) throw InvalidArgument("config key 'task." + std::string(key) + "' needs task.kind = synthetic");
    }
    for (const char* key : {"train_dir", "test_dir", "vocab"}) {
      if (!j.contains(key)) throw InvalidArgument("folder task needs 'task." + std::string(key) + "'");
    }
    t.train_dir = existing_path(j, "train_dir", base, where);
    t.test_dir = existing_path(j, "test_dir", base, where);
    t.vocab = existing_path(j, "vocab", base, where);
  }
  return t;
}

RetrievalConfig retrieval_from_json(const Json& j, const fs::path& base) {
  const std::string where = "retrieval";
  RetrievalConfig r;
  if (j.is_null()) return r;
  reject_unknown_keys(j, {"corpus", "method", "k", "t2i_threshold", "mode", "fewshot_ratio"}, where);
  if (j.contains("corpus")) r.corpus = existing_path(j, "corpus", base, where);
  r.method = parse_enum(j, "method", where, retrieval::parse_rank_method, r.method);
  read_key(j, "k", r.k, where);
  if (j.contains("t2i_threshold") && !j.at("t2i_threshold").is_null()) {
    double v = 0.0;
    read_key(j, "t2i_threshold", v, where);
    r.t2i_threshold = v;
  }
  if (j.contains("mode")) {
    std::string mode;
    read_key(j, "mode", mode, where);
    if (mode == "retrieved_only") r.retrieved_only = true;
    else if (mode != "mixed") throw InvalidArgument("config key 'retrieval.mode' must be mixed or retrieved_only");
  }
  if (j.contains("fewshot_ratio") && !j.at("fewshot_ratio").is_null()) {
    double v = 0.0;
    read_key(j, "fewshot_ratio", v, where);
    r.fewshot_ratio = v;
  }
  return r;
}

ModelConfig model_from_json(const Json& j, const fs::path& base) {
  const std::string where = "model";
  ModelConfig m;
  if (j.is_null()) return m;
  reject_unknown_keys(j, {"embed_dim", "embedder_seed", "filters", "checkpoint"}, where);
  read_key(j, "embed_dim", m.embed_dim, where);
  read_key(j, "embedder_seed", m.embedder_seed, where);
  read_key(j, "filters", m.filters, where);
  if (j.contains("checkpoint") && !j.at("checkpoint").is_null()) m.checkpoint = existing_path(j, "checkpoint", base, where);
  return m;
}

EvalConfig eval_from_json(const Json& j) {
  const std::string where = "eval";
  EvalConfig e;
  if (j.is_null()) return e;
  reject_unknown_keys(j, {"curve_epochs", "monitor_test", "probe"}, where);
  read_key(j, "curve_epochs", e.curve_epochs, where);
  read_key(j, "monitor_test", e.monitor_test, where);
  if (j.contains("probe")) e.probe = evaluation::ProbeConfig::from_json(j.at("probe"), "eval.probe");
  return e;
}

}  // namespace

void ExperimentConfig::validate() const {
  train.validate();
  train.msda.validate();
  if (seeds.empty()) throw InvalidArgument("config key 'seeds' must list at least one seed");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) throw InvalidArgument("config key 'seeds' lists a seed twice");
  if (task.shots < 1) throw InvalidArgument("config key 'task.shots' must be >= 1");
  if (retrieval.k < 1) throw InvalidArgument("config key 'retrieval.k' must be >= 1");
  if (retrieval.t2i_threshold && !(*retrieval.t2i_threshold >= -1.0 && *retrieval.t2i_threshold <= 1.0)) {
    throw InvalidArgument("config key 'retrieval.t2i_threshold' must lie in [-1, 1]");
  }
  if (retrieval.fewshot_ratio) {
    if (!(*retrieval.fewshot_ratio > 0.0 && *retrieval.fewshot_ratio < 1.0)) {
      throw InvalidArgument("config key 'retrieval.fewshot_ratio' must lie in (0, 1)");
    }
    if (retrieval.retrieved_only) {
      throw InvalidArgument("config key 'retrieval.fewshot_ratio' conflicts with mode retrieved_only");
    }
  }
  if (task.kind == TaskKind::kSynthetic) {
    task.synthetic.validate();
    task.pretrain.validate();
    if (!retrieval.corpus.empty()) throw InvalidArgument("config key 'retrieval.corpus' needs task.kind = folder");
    if (retrieval.t2i_threshold) throw InvalidArgument("config key 'retrieval.t2i_threshold' needs task.kind = folder");
    if (retrieval.method != retrieval::RankMethod::kT2T) {
      throw InvalidArgument("config key 'retrieval.method' needs task.kind = folder");
    }
    if (task.shots > task.synthetic.train_per_class) {
      throw InvalidArgument("config key 'task.shots' exceeds task.synthetic.train_per_class");
    }
  } else {
    if (retrieval.corpus.empty()) throw InvalidArgument("folder task needs 'retrieval.corpus'");
    if (model.embed_dim < 2 || model.filters < 1) throw InvalidArgument("config block 'model' has invalid sizes");
  }
  for (std::size_t i = 0; i < eval.curve_epochs.size(); ++i) {
    if (eval.curve_epochs[i] < 1 || (i > 0 && eval.curve_epochs[i] <= eval.curve_epochs[i - 1])) {
      throw InvalidArgument("config key 'eval.curve_epochs' must be ascending and >= 1");
    }
  }
  if (output_dir.empty()) throw InvalidArgument("config key 'output_dir' must not be empty");
}

Json ExperimentConfig::to_json() const {
  Json task_json{{"kind", task.kind == TaskKind::kSynthetic ? "synthetic" : "folder"}, {"shots", task.shots}};
  if (task.kind == TaskKind::kSynthetic) {
    task_json["synthetic"] = task.synthetic.to_json();
    task_json["pretrain"] = task.pretrain.to_json();
  } else {
    task_json["train_dir"] = task.train_dir.string();
    task_json["test_dir"] = task.test_dir.string();
    task_json["vocab"] = task.vocab.string();
  }
  Json retrieval_json{{"method", retrieval::to_string(retrieval.method)},
                      {"k", retrieval.k},
                      {"mode", retrieval.retrieved_only ? "retrieved_only" : "mixed"},
                      {"fewshot_ratio", retrieval.fewshot_ratio ? Json(*retrieval.fewshot_ratio) : Json(nullptr)}};
  if (task.kind == TaskKind::kFolder) {
    retrieval_json["corpus"] = retrieval.corpus.string();
    retrieval_json["t2i_threshold"] = retrieval.t2i_threshold ? Json(*retrieval.t2i_threshold) : Json(nullptr);
  }
  Json train_json = train.to_json();
  train_json.erase("seed");
  const Json msda_json = train_json.at("msda");
  train_json.erase("msda");
  Json out{{"method", to_string(method)}, {"task", task_json}, {"retrieval", retrieval_json}};
  if (task.kind == TaskKind::kFolder) {
    out["model"] = Json{{"embed_dim", model.embed_dim},
                        {"embedder_seed", model.embedder_seed},
                        {"filters", model.filters},
                        {"checkpoint", model.checkpoint ? Json(model.checkpoint->string()) : Json(nullptr)}};
  }
  out["train"] = train_json;
  out["msda"] = msda_json;
  out["eval"] = Json{{"curve_epochs", eval.curve_epochs}, {"monitor_test", eval.monitor_test}, {"probe", eval.probe.to_json()}};
  out["seeds"] = seeds;
  out["output_dir"] = output_dir.string();
  return out;
}

std::string ExperimentConfig::hash() const {
  Json j = to_json();
  j.erase("output_dir");
  return to_hex(fnv1a(j.dump()));
}

std::vector<std::string> ExperimentConfig::protocol_deviations() const {
  const Json published = training::TrainConfig{}.to_json();
  Json ours = train.to_json();
  std::vector<std::string> out;
  for (const auto& [key, value] : ours.items()) {
    if (key == "seed") continue;
    if (value != published.at(key)) out.push_back("train." + key + ": " + value.dump());
  }
  return out;
}

ExperimentConfig config_from_json(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> known{"method", "task",  "retrieval", "model",     "train",
                                           "msda",   "eval",  "seeds",     "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw InvalidArgument("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  c.method = parse_enum(j, "method", "", parse_method, c.method);
  if (j.contains("task")) c.task = task_from_json(j.at("task"), base_dir);
  if (j.contains("retrieval")) c.retrieval = retrieval_from_json(j.at("retrieval"), base_dir);
  if (j.contains("model")) c.model = model_from_json(j.at("model"), base_dir);
  if (j.contains("train")) {
    if (j.at("train").is_object() && j.at("train").contains("seed")) {
      throw InvalidArgument("config key 'train.seed' is not accepted; list run seeds under 'seeds'");
    }
    c.train = training::TrainConfig::from_json(j.at("train"), "train");
  }
  if (j.contains("msda")) {
    if (j.contains("train") && j.at("train").contains("msda")) {
      throw InvalidArgument("config keys 'msda' and 'train.msda' are both set");
    }
    c.train.msda = training::msda_from_json(j.at("msda"), "msda");
  }
  if (j.contains("eval")) c.eval = eval_from_json(j.at("eval"));
  if (j.contains("seeds")) {
    c.seeds.clear();
    read_key(j, "seeds", c.seeds, "");
  }
  if (j.contains("output_dir")) {
    std::string out;
    read_key(j, "output_dir", out, "");
    c.output_dir = out;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config file '" + path.string() + "' does not exist");
  const Json j = read_json_file(path);
  return config_from_json(j, path.parent_path());
}

}  // namespace swat::experiment
