// Command-line front end: one subcommand per pipeline step.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "swat/core/error.hpp"
#include "swat/core/json_io.hpp"
#include "swat/core/svg_plot.hpp"
#include "swat/datasets/folder_dataset.hpp"
#include "swat/datasets/synthetic.hpp"
#include "swat/evaluation/evaluate.hpp"
#include "swat/experiment/experiment.hpp"
#include "swat/experiment/sweep.hpp"
#include "swat/model/checkpoint.hpp"
#include "swat/retrieval/corpus.hpp"
#include "swat/retrieval/corpus_index.hpp"
#include "swat/retrieval/retrieval_io.hpp"

namespace fs = std::filesystem;
using namespace swat;

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::size_t threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config = true) {
  auto* c = cmd->add_option("--config", o.config, "experiment config (JSON)");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seeds, "run seed(s); replaces the config's seed list");
  cmd->add_option("--out", o.out, "output directory; replaces the config's output_dir");
  cmd->add_option("--threads", o.threads, "worker threads for seeds and curve cells")->check(CLI::PositiveNumber);
}

experiment::ExperimentConfig load(const CommonOptions& o) {
  auto cfg = experiment::load_config(o.config);
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (!o.out.empty()) cfg.output_dir = o.out;
  cfg.validate();
  return cfg;
}

void report_deviations(const experiment::ExperimentConfig& cfg) {
  for (const auto& d : cfg.protocol_deviations()) std::cerr << "protocol deviation: " << d << "\n";
}

void print_metrics(const Json& aggregate) {
  const auto& m = aggregate.at("metrics");
  for (const char* name : {"overall_acc", "common_acc", "rare_acc"}) {
    const auto& v = m.at(name);
    std::cout << name << ": " << (v.at("mean").is_null() ? std::string("n/a") : std::to_string(v.at("mean").get<double>()))
              << " +- " << (v.at("std").is_null() ? std::string("n/a") : std::to_string(v.at("std").get<double>()))
              << "\n";
  }
}

void run_method(const CommonOptions& o, std::optional<experiment::Method> method) {
  auto cfg = load(o);
  if (method) cfg.method = *method;
  report_deviations(cfg);
  const auto result = experiment::run_experiment(cfg, {true, o.threads});
  print_metrics(result.aggregate);
  std::cout << "wrote " << cfg.output_dir.string() << "\n";
}

void run_stage2(const CommonOptions& o, const std::string& checkpoint, bool finetune_all) {
  auto cfg = load(o);
  report_deviations(cfg);
  const auto task = experiment::PreparedTask::prepare(cfg);
  const auto ckpt = model::load_checkpoint(checkpoint);
  if (ckpt.class_names != task.vocab().names()) throw InvalidArgument("stage2: checkpoint classes differ from the task");
  std::vector<experiment::SeedRun> runs;
  for (std::uint64_t seed : cfg.seeds) {
    training::TrainConfig tc = cfg.train;
    tc.seed = seed;
    auto fs = task.few_shot(seed);
    auto r = finetune_all ? training::stage2_finetune_all(ckpt.model, fs, tc)
                          : training::stage2_retrain_classifier(ckpt.model, fs, tc);
    auto report = evaluation::evaluate(r.model, task.test(), task.split());
    const fs::path dir = cfg.output_dir / ("seed_" + std::to_string(seed));
    model::save_checkpoint(dir / "model.ckpt", r.model, cfg.hash(), task.vocab().names());
    write_json_file(dir / "logs.json", Json::array({r.log.to_json()}));
    runs.push_back({seed, report, std::nullopt, {r.log}, std::nullopt, std::move(r.model), std::move(fs), r.log.wall_seconds});
    write_json_file(dir / "report.json", runs.back().report_json(finetune_all ? experiment::Method::kSwatPlus
                                                                               : experiment::Method::kSwat));
  }
  auto aggregate = experiment::aggregate_runs(cfg, runs);
  aggregate["stage1_checkpoint"] = checkpoint;
  write_json_file(cfg.output_dir / "aggregate.json", aggregate);
  print_metrics(aggregate);
}

void run_eval(const CommonOptions& o, const std::string& checkpoint) {
  auto cfg = load(o);
  const auto task = experiment::PreparedTask::prepare(cfg);
  const auto ckpt = model::load_checkpoint(checkpoint);
  if (ckpt.class_names != task.vocab().names()) throw InvalidArgument("eval: checkpoint classes differ from the task");
  const auto report = evaluation::evaluate(ckpt.model, task.test(), task.split());
  Json j{{"schema_version", experiment::kReportSchemaVersion},
         {"checkpoint", checkpoint},
         {"stage", model::to_string(ckpt.model.stage())},
         {"report", report.to_json()}};
  write_json_file(cfg.output_dir / "eval.json", j);
  std::cout << "overall_acc: " << report.overall_acc << "\ncommon_acc: " << report.common_acc
            << "\nrare_acc: " << report.rare_acc << "\n";
}

void write_count_plot(const fs::path& path, const retrieval::ImbalanceStats& stats) {
  PlotSeries s{"retrieved per concept", {}, {}, {}};
  for (std::size_t i = 0; i < stats.sorted_curve.size(); ++i) {
    s.x.push_back(static_cast<double>(i + 1));
    s.y.push_back(stats.sorted_curve[i]);
  }
  write_svg(path, PlotSpec{"Retrieved examples per concept", "concept (sorted)", "count", {s}});
}

void run_retrieve(const CommonOptions& o) {
  auto cfg = load(o);
  const auto task = experiment::PreparedTask::prepare(cfg);
  const auto& stats = task.retrieval_stats();
  if (cfg.task.kind == experiment::TaskKind::kFolder) {
    for (std::uint64_t seed : cfg.seeds) {
      const auto pool = task.retrieved_pool(task.few_shot(seed), seed);
      retrieval::write_pool_jsonl(cfg.output_dir / ("pool_seed_" + std::to_string(seed) + ".jsonl"), pool);
    }
  }
  write_json_file(cfg.output_dir / "retrieval_stats.json", retrieval::stats_to_json(stats, task.vocab()));
  write_count_plot(cfg.output_dir / "retrieval_counts.svg", stats);
  std::cout << "total " << stats.total << ", min " << stats.min << ", max " << stats.max << ", gini " << stats.gini
            << "\n";
}

struct RetrieveOptions {
  std::string corpus;
  std::string vocab;
  std::string method = "t2t";
  int k = 500;
  std::optional<double> t2i_threshold;
  std::string fewshot_dir;
  int shots = 16;
  int embed_dim = 64;
  std::uint64_t embedder_seed = 0;
};

// Retrieval straight from corpus and vocabulary files, without a config.
void run_retrieve_files(const RetrieveOptions& r, std::uint64_t seed, const fs::path& out) {
  const auto vocab = retrieval::ConceptVocabulary::load(r.vocab);
  const auto index = retrieval::CorpusIndex::build(retrieval::load_corpus_jsonl(r.corpus));
  const int payload_dim = index.empty() ? r.embed_dim : retrieval::payload_shape(index.record(0)).size();
  const retrieval::ToyEmbedder embedder(r.embed_dim, r.embedder_seed, payload_dim);
  retrieval::FewShotPayloads payloads(static_cast<std::size_t>(vocab.size()));
  if (!r.fewshot_dir.empty()) {
    const auto fewshot = datasets::sample_few_shot(datasets::load_folder_dataset(r.fewshot_dir, vocab), r.shots, seed);
    for (std::size_t i = 0; i < fewshot.examples.size(); ++i) {
      payloads[static_cast<std::size_t>(fewshot.examples.labels[i])].push_back(
          fewshot.examples.inputs.row(static_cast<Eigen::Index>(i)).transpose());
    }
  }
  const retrieval::RankContext ctx{index, vocab, embedder, r.fewshot_dir.empty() ? nullptr : &payloads, seed};
  auto ranked = retrieval::rank(retrieval::string_match(index, vocab), retrieval::parse_rank_method(r.method), ctx);
  if (r.t2i_threshold) ranked = retrieval::filter_by_image_similarity(ranked, *r.t2i_threshold, ctx);
  const auto pool = retrieval::select_top_k(ranked, r.k);
  const auto stats = retrieval::imbalance_stats(pool);
  retrieval::write_pool_jsonl(out / "pool.jsonl", pool);
  write_json_file(out / "retrieval_stats.json", retrieval::stats_to_json(stats, vocab));
  write_count_plot(out / "retrieval_counts.svg", stats);
  std::cout << "total " << stats.total << ", min " << stats.min << ", max " << stats.max << ", gini " << stats.gini
            << "\n";
}

void run_probe(const CommonOptions& o) {
  auto cfg = load(o);
  const auto task = experiment::PreparedTask::prepare(cfg);
  const auto results = experiment::probe_domain_gap(cfg, task);
  std::vector<double> acc;
  Json per_seed = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    acc.push_back(results[i].accuracy);
    Json r = results[i].to_json();
    r["seed"] = cfg.seeds[i];
    per_seed.push_back(r);
  }
  const auto ms = evaluation::mean_std(acc);
  write_json_file(cfg.output_dir / "probe.json", Json{{"schema_version", experiment::kReportSchemaVersion},
                                                      {"probe", cfg.eval.probe.to_json()},
                                                      {"runs", per_seed},
                                                      {"accuracy", {{"mean", ms.mean}, {"std", ms.std}}}});
  std::cout << "held-out source accuracy: " << ms.mean << " +- " << ms.std << "\n";
}

Json parse_sweep_value(const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return Json(v);
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return Json(v);
  } catch (const std::exception&) {
  }
  return Json(text);
}

void run_sweep(const CommonOptions& o, const std::string& axis, const std::vector<std::string>& values) {
  auto cfg = load(o);
  report_deviations(cfg);
  std::vector<Json> parsed;
  for (const auto& v : values) parsed.push_back(parse_sweep_value(v));
  const auto result = experiment::sweep(cfg, experiment::parse_sweep_axis(axis), parsed, {true, o.threads});
  std::cout << result.to_csv();
}

void write_labeled_jsonl(const fs::path& path, const datasets::LabeledSet& set) {
  std::string text;
  for (std::size_t i = 0; i < set.size(); ++i) {
    Json j{{"id", set.ids[i]},
           {"concept", set.class_names[static_cast<std::size_t>(set.labels[i])]},
           {"source", to_string(set.sources[i])},
           {"features", to_json(Vector(set.inputs.row(static_cast<Eigen::Index>(i)).transpose()))}};
    text += j.dump() + "\n";
  }
  write_text_file(path, text);
}

void run_synth_gen(const std::string& spec_path, const std::string& out) {
  datasets::SyntheticTaskSpec spec;
  if (!spec_path.empty()) spec = datasets::SyntheticTaskSpec::from_json(read_json_file(spec_path));
  const auto task = datasets::generate_synthetic_task(spec);
  const fs::path dir = out;
  write_json_file(dir / "spec.json", spec.to_json());
  write_json_file(dir / "vocab.json", task.vocab.to_json());
  write_json_file(dir / "retrieved_counts.json", task.retrieved_counts);
  write_labeled_jsonl(dir / "train.jsonl", task.train_pool);
  write_labeled_jsonl(dir / "retrieved.jsonl", task.retrieved);
  write_labeled_jsonl(dir / "test.jsonl", task.test);
  std::cout << "wrote " << task.train_pool.size() << " train, " << task.retrieved.size() << " retrieved, "
            << task.test.size() << " test examples to " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieval-augmented few-shot finetuning toolkit"};
  app.require_subcommand(1);

  CommonOptions o;
  std::string checkpoint;
  std::string method;
  std::string axis;
  std::vector<std::string> values;
  std::string spec_path;
  std::string synth_out = "synthetic";

  auto* run = app.add_subcommand("run", "run the config's method for every seed");
  add_common(run, o);
  run->add_option("--method", method, "override the config's method");
  auto* fsft = app.add_subcommand("fsft", "few-shot finetuning");
  add_common(fsft, o);
  auto* swat_cmd = app.add_subcommand("swat", "stage-1 finetuning on mixed data, then classifier retraining");
  add_common(swat_cmd, o);
  auto* swat_plus = app.add_subcommand("swat-plus", "stage-1, then stage-2 finetuning of encoder and classifier");
  add_common(swat_plus, o);
  auto* stage1 = app.add_subcommand("stage1", "stage-1 finetuning only");
  add_common(stage1, o);
  auto* stage2 = app.add_subcommand("stage2", "classifier retraining from a stage-1 checkpoint");
  add_common(stage2, o);
  stage2->add_option("--checkpoint", checkpoint, "stage-1 checkpoint")->required()->check(CLI::ExistingFile);
  bool stage2_all = false;
  stage2->add_flag("--all", stage2_all, "also finetune the encoder");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the task's test set");
  add_common(eval, o);
  eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required()->check(CLI::ExistingFile);
  auto* retrieve = app.add_subcommand("retrieve", "retrieve and rank corpus examples, write pools and statistics");
  add_common(retrieve, o, false);
  RetrieveOptions ro;
  retrieve->add_option("--corpus", ro.corpus, "caption corpus (JSON lines); used without --config")
      ->check(CLI::ExistingFile);
  retrieve->add_option("--vocab", ro.vocab, "concept vocabulary (JSON)")->check(CLI::ExistingFile);
  retrieve->add_option("--rank-method", ro.method, "t2t, i2i, i2t-cap, i2t-img or random");
  retrieve->add_option("--k", ro.k, "records kept per concept");
  retrieve->add_option("--t2i-threshold", ro.t2i_threshold, "drop candidates below this prompt-image cosine");
  retrieve->add_option("--fewshot-dir", ro.fewshot_dir, "few-shot images (<dir>/<concept>/*.pgm|ppm) for i2i, i2t-cap");
  retrieve->add_option("--shots", ro.shots, "few-shot examples per concept");
  retrieve->add_option("--embed-dim", ro.embed_dim, "toy embedder dimension");
  retrieve->add_option("--embedder-seed", ro.embedder_seed, "toy embedder seed");
  auto* probe = app.add_subcommand("probe-gap", "train a source classifier between retrieved and downstream data");
  add_common(probe, o);
  auto* sweep_cmd = app.add_subcommand("sweep", "one experiment per value of an axis");
  add_common(sweep_cmd, o);
  sweep_cmd->add_option("--axis", axis, "retrieval_k, fewshot_ratio, stage1_epochs or msda_method")->required();
  sweep_cmd->add_option("--values", values, "axis values")->required()->delimiter(',');
  auto* synth = app.add_subcommand("synth-gen", "write a synthetic task as JSON lines");
  synth->add_option("--spec", spec_path, "synthetic task spec (JSON); defaults when omitted")->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "run") run_method(o, method.empty() ? std::nullopt : std::optional(experiment::parse_method(method)));
    else if (name == "fsft") run_method(o, experiment::Method::kFsft);
    else if (name == "swat") run_method(o, experiment::Method::kSwat);
    else if (name == "swat-plus") run_method(o, experiment::Method::kSwatPlus);
    else if (name == "stage1") run_method(o, experiment::Method::kStage1Only);
    else if (name == "stage2") run_stage2(o, checkpoint, stage2_all);
    else if (name == "eval") run_eval(o, checkpoint);
    else if (name == "retrieve") {
      if (!o.config.empty()) {
        run_retrieve(o);
      } else {
        if (ro.corpus.empty() || ro.vocab.empty()) throw InvalidArgument("retrieve needs --config or --corpus and --vocab");
        run_retrieve_files(ro, o.seeds.empty() ? 0 : o.seeds.front(), o.out.empty() ? fs::path("retrieval") : fs::path(o.out));
      }
    }
    else if (name == "probe-gap") run_probe(o);
    else if (name == "sweep") run_sweep(o, axis, values);
    else if (name == "synth-gen") run_synth_gen(spec_path, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "swat " << name << ": error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
