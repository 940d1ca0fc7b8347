#include "swat/experiment/experiment.hpp"

#include <chrono>
#include <cmath>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/parallel.hpp"
#include "swat/core/svg_plot.hpp"
#include "swat/datasets/folder_dataset.hpp"
#include "swat/datasets/synthetic.hpp"
#include "swat/model/checkpoint.hpp"
#include "swat/model/pretrain.hpp"
#include "swat/retrieval/corpus.hpp"
#include "swat/retrieval/corpus_index.hpp"
#include "swat/retrieval/retrieval_io.hpp"

namespace swat::experiment {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRatioStream = 0x726174696f;  // "ratio"

bool two_stage(Method m) { return m == Method::kSwat || m == Method::kSwatPlus; }
bool uses_retrieval(Method m) { return two_stage(m) || m == Method::kStage1Only; }

// Runs fn, prefixing any error with the pipeline stage it came from.
template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NumericError& e) {
    throw NumericError(stage + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(stage + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(stage + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(stage + ": " + e.what());
  }
}

// First k rows of each class, in row order.
datasets::LabeledSet first_k_per_class(const datasets::LabeledSet& set, int k) {
  std::vector<int> taken(static_cast<std::size_t>(set.num_classes()), 0);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto& n = taken[static_cast<std::size_t>(set.labels[i])];
    if (n < k) {
      ++n;
      rows.push_back(i);
    }
  }
  return set.subset(rows);
}

Json metric_json(const std::vector<double>& values) {
  const auto ms = evaluation::mean_std(values);
  Json vals = Json::array();
  for (double v : values) vals.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
  const auto num = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  return Json{{"mean", num(ms.mean)}, {"std", num(ms.std)}, {"values", vals}};
}

Json metrics_json(const std::vector<const evaluation::EvalReport*>& reports) {
  std::vector<double> overall, common, rare;
  for (const auto* r : reports) {
    overall.push_back(r->overall_acc);
    common.push_back(r->common_acc);
    rare.push_back(r->rare_acc);
  }
  return Json{{"overall_acc", metric_json(overall)}, {"common_acc", metric_json(common)}, {"rare_acc", metric_json(rare)}};
}

std::string seed_dir(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

}  // namespace

// ---------------------------------------------------------------------------

struct PreparedTask::State {
  ExperimentConfig cfg;
  retrieval::ConceptVocabulary vocab;
  datasets::LabeledSet train_pool;
  datasets::LabeledSet test;
  std::optional<model::Model> base;
  std::unique_ptr<retrieval::TextImageEmbedder> embedder;
  datasets::CommonRareSplit split;
  retrieval::ImbalanceStats stats;
  // Synthetic tasks.
  datasets::LabeledSet synthetic_retrieved;
  // Corpus tasks.
  std::optional<retrieval::CorpusIndex> index;
  retrieval::MatchTable matches;
};

PreparedTask PreparedTask::prepare(const ExperimentConfig& cfg) {
  cfg.validate();
  auto st = std::make_shared<State>();
  st->cfg = cfg;
  PreparedTask task;
  if (cfg.task.kind == TaskKind::kSynthetic) {
    staged("task", [&] {
      const auto generated = datasets::generate_synthetic_task(cfg.task.synthetic);
      st->vocab = generated.vocab;
      st->train_pool = generated.train_pool;
      st->test = generated.test;
      st->synthetic_retrieved = first_k_per_class(generated.retrieved, cfg.retrieval.k);
      st->embedder = std::make_unique<retrieval::ToyEmbedder>(cfg.task.synthetic.dim,
                                                              datasets::synthetic_embedder_seed(cfg.task.synthetic));
      return 0;
    });
    staged("pretrain", [&] {
      st->base = model::pretrained_synthetic_model(cfg.task.synthetic, cfg.task.pretrain, cfg.train.temperature_init);
      return 0;
    });
    st->stats = retrieval::imbalance_stats(st->synthetic_retrieved.class_counts());
  } else {
    staged("task", [&] {
      st->vocab = retrieval::ConceptVocabulary::load(cfg.task.vocab);
      st->train_pool = datasets::load_folder_dataset(cfg.task.train_dir, st->vocab);
      st->test = datasets::load_folder_dataset(cfg.task.test_dir, st->vocab);
      if (st->train_pool.shape != st->test.shape) throw InvalidArgument("train and test images differ in shape");
      st->embedder = std::make_unique<retrieval::ToyEmbedder>(cfg.model.embed_dim, cfg.model.embedder_seed,
                                                              st->train_pool.shape.size());
      return 0;
    });
    staged("model", [&] {
      if (cfg.model.checkpoint) {
        auto ckpt = model::load_checkpoint(*cfg.model.checkpoint);
        if (ckpt.class_names != st->vocab.names()) {
          throw InvalidArgument("checkpoint classes do not match the task vocabulary");
        }
        if (ckpt.model.encoder().input_shape() != st->train_pool.shape) {
          throw InvalidArgument("checkpoint encoder expects a different input shape");
        }
        st->base = std::move(ckpt.model);
      } else {
        auto encoder = std::make_unique<model::ConvEncoder>(st->train_pool.shape, cfg.model.filters,
                                                            cfg.model.embed_dim, cfg.model.embedder_seed);
        st->base = model::Model(std::move(encoder),
                                model::init_head_from_text(st->vocab, *st->embedder, cfg.train.temperature_init),
                                model::Stage::kPretrained);
      }
      return 0;
    });
    staged("retrieve", [&] {
      st->index = retrieval::CorpusIndex::build(retrieval::load_corpus_jsonl(cfg.retrieval.corpus));
      st->matches = retrieval::string_match(*st->index, st->vocab);
      return 0;
    });
  }
  task.state_ = st;
  if (cfg.task.kind == TaskKind::kFolder) {
    const std::uint64_t seed = cfg.seeds.front();
    st->stats = staged("retrieve", [&] { return retrieval::imbalance_stats(task.retrieved_pool(task.few_shot(seed), seed)); });
  }
  st->split = datasets::split_common_rare(st->stats.counts);
  return task;
}

const retrieval::ConceptVocabulary& PreparedTask::vocab() const { return state_->vocab; }
const datasets::LabeledSet& PreparedTask::train_pool() const { return state_->train_pool; }
const datasets::LabeledSet& PreparedTask::test() const { return state_->test; }
const model::Model& PreparedTask::base_model() const { return *state_->base; }
const retrieval::TextImageEmbedder& PreparedTask::embedder() const { return *state_->embedder; }
const datasets::CommonRareSplit& PreparedTask::split() const { return state_->split; }
const retrieval::ImbalanceStats& PreparedTask::retrieval_stats() const { return state_->stats; }

datasets::FewShotSplit PreparedTask::few_shot(std::uint64_t seed) const {
  return staged("fewshot", [&] { return datasets::sample_few_shot(state_->train_pool, state_->cfg.task.shots, seed); });
}

retrieval::RetrievedPool PreparedTask::retrieved_pool(const datasets::FewShotSplit& fewshot, std::uint64_t seed) const {
  if (!state_->index) throw InvalidArgument("retrieved_pool needs a corpus task");
  const auto& cfg = state_->cfg;
  retrieval::FewShotPayloads payloads(static_cast<std::size_t>(state_->vocab.size()));
  for (std::size_t i = 0; i < fewshot.examples.size(); ++i) {
    payloads[static_cast<std::size_t>(fewshot.examples.labels[i])].push_back(
        fewshot.examples.inputs.row(static_cast<Eigen::Index>(i)).transpose());
  }
  const retrieval::RankContext ctx{*state_->index, state_->vocab, *state_->embedder, &payloads, seed};
  auto ranked = retrieval::rank(state_->matches, cfg.retrieval.method, ctx);
  if (cfg.retrieval.t2i_threshold) ranked = retrieval::filter_by_image_similarity(ranked, *cfg.retrieval.t2i_threshold, ctx);
  return retrieval::select_top_k(ranked, cfg.retrieval.k);
}

datasets::LabeledSet PreparedTask::retrieved(const datasets::FewShotSplit& fewshot, std::uint64_t seed) const {
  if (state_->cfg.task.kind == TaskKind::kSynthetic) return state_->synthetic_retrieved;
  return staged("retrieve", [&] {
    return datasets::labeled_set_from_pool(retrieved_pool(fewshot, seed), *state_->index, state_->vocab.names());
  });
}

// ---------------------------------------------------------------------------

Json SeedRun::report_json(Method method) const {
  Json j{{"schema_version", kReportSchemaVersion},
         {"method", to_string(method)},
         {"seed", seed},
         {"final", report.to_json()}};
  if (stage1_report) j["stage1"] = stage1_report->to_json();
  j["fewshot"] = fewshot.to_json();
  return j;
}

SeedRun run_seed(const ExperimentConfig& cfg, const PreparedTask& task, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  training::TrainConfig tc = cfg.train;
  tc.seed = seed;
  training::EpochMonitor monitor;
  if (cfg.eval.monitor_test) {
    monitor = [&task](int, const model::Model& m) -> std::optional<double> {
      return evaluation::evaluate(m, task.test(), task.split()).overall_acc;
    };
  }
  auto fs = task.few_shot(seed);
  const model::Model& base = task.base_model();
  std::optional<model::Model> stage1_model;
  std::vector<training::TrainingLog> logs;
  model::Model final_model = base;

  switch (cfg.method) {
    case Method::kZeroShotHead:
      break;
    case Method::kLinearProbe: {
      auto r = staged("linear_probe", [&] { return training::linear_probe(base, fs, tc, monitor); });
      final_model = std::move(r.model);
      logs.push_back(std::move(r.log));
      break;
    }
    case Method::kFsft: {
      auto r = staged("fsft", [&] { return training::fsft(base, fs, tc, monitor); });
      final_model = std::move(r.model);
      logs.push_back(std::move(r.log));
      break;
    }
    case Method::kStage1Only:
    case Method::kSwat:
    case Method::kSwatPlus: {
      const auto retrieved = task.retrieved(fs, seed);
      const auto data = staged("mix", [&] {
        if (cfg.retrieval.retrieved_only) {
          if (retrieved.is_empty()) throw InvalidArgument("retrieved-only training with an empty retrieved set");
          return retrieved;
        }
        if (cfg.retrieval.fewshot_ratio) {
          return datasets::mix_pools_with_ratio(retrieved, fs, *cfg.retrieval.fewshot_ratio, mix_seed(seed, kRatioStream));
        }
        return datasets::mix_pools(retrieved, fs);
      });
      auto s1 = staged("stage1", [&] { return training::stage1_finetune(base, data, tc, monitor); });
      logs.push_back(std::move(s1.log));
      if (cfg.method == Method::kStage1Only) {
        final_model = std::move(s1.model);
        break;
      }
      auto s2 = staged("stage2", [&] {
        return cfg.method == Method::kSwat ? training::stage2_retrain_classifier(s1.model, fs, tc, monitor)
                                           : training::stage2_finetune_all(s1.model, fs, tc, monitor);
      });
      stage1_model = std::move(s1.model);
      final_model = std::move(s2.model);
      logs.push_back(std::move(s2.log));
      break;
    }
  }

  SeedRun run{seed, staged("eval", [&] { return evaluation::evaluate(final_model, task.test(), task.split()); }),
              std::nullopt, std::move(logs), std::nullopt, std::move(final_model), std::move(fs), 0.0};
  if (stage1_model) {
    run.stage1_report = staged("eval", [&] { return evaluation::evaluate(*stage1_model, task.test(), task.split()); });
    run.stage1_model = std::move(stage1_model);
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

Json aggregate_runs(const ExperimentConfig& cfg, const std::vector<SeedRun>& runs) {
  if (runs.empty()) throw InvalidArgument("nothing to aggregate");
  std::vector<const evaluation::EvalReport*> finals;
  std::vector<const evaluation::EvalReport*> stage1;
  Json seeds = Json::array();
  for (const auto& r : runs) {
    seeds.push_back(r.seed);
    finals.push_back(&r.report);
    if (r.stage1_report) stage1.push_back(&*r.stage1_report);
  }
  Json j{{"schema_version", kReportSchemaVersion},
         {"method", to_string(cfg.method)},
         {"config_hash", cfg.hash()},
         {"seeds", seeds},
         {"n_runs", runs.size()},
         {"averaging", {{"overall", "micro"}, {"common", "macro"}, {"rare", "macro"}}},
         {"rare_classes", runs.front().report.split.rare},
         {"metrics", metrics_json(finals)}};
  if (stage1.size() == runs.size()) j["stage1_metrics"] = metrics_json(stage1);
  j["protocol_deviations"] = cfg.protocol_deviations();
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto task = PreparedTask::prepare(cfg);
  return run_experiment(cfg, task, options);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const PreparedTask& task, const RunOptions& options) {
  cfg.validate();
  if (!cfg.eval.curve_epochs.empty() && !two_stage(cfg.method)) {
    throw InvalidArgument("eval.curve_epochs needs method swat or swat_plus");
  }
  std::vector<std::optional<SeedRun>> slots(cfg.seeds.size());
  parallel_for(
      cfg.seeds.size(), [&](std::size_t i) { slots[i] = run_seed(cfg, task, cfg.seeds[i]); }, options.max_threads);
  ExperimentResult result;
  for (auto& s : slots) result.runs.push_back(std::move(*s));
  result.aggregate = aggregate_runs(cfg, result.runs);
  if (uses_retrieval(cfg.method)) {
    result.aggregate["retrieval"] = retrieval::stats_to_json(task.retrieval_stats(), task.vocab());
  }

  if (!cfg.eval.curve_epochs.empty()) {
    const auto cell = [&](int epochs, std::uint64_t seed) {
      const SeedRun* run = nullptr;
      for (const auto& r : result.runs) {
        if (r.seed == seed) run = &r;
      }
      training::TrainConfig tc = cfg.train;
      tc.seed = seed;
      tc.epochs_stage2 = epochs;
      auto s2 = staged("curve", [&] {
        return cfg.method == Method::kSwat ? training::stage2_retrain_classifier(*run->stage1_model, run->fewshot, tc)
                                           : training::stage2_finetune_all(*run->stage1_model, run->fewshot, tc);
      });
      return evaluation::evaluate(s2.model, task.test(), task.split()).overall_acc;
    };
    result.curve = evaluation::curve_study(cell, cfg.eval.curve_epochs, cfg.seeds, options.max_threads);
    result.aggregate["curve"] = result.curve->to_json();
  }

  if (options.write_outputs) {
    const fs::path out = cfg.output_dir;
    staged("write", [&] {
      write_json_file(out / "config.json", cfg.to_json());
      Json timing = Json::object();
      for (const auto& r : result.runs) {
        const fs::path dir = out / seed_dir(r.seed);
        write_json_file(dir / "report.json", r.report_json(cfg.method));
        Json logs = Json::array();
        for (const auto& log : r.logs) logs.push_back(log.to_json());
        write_json_file(dir / "logs.json", logs);
        model::save_checkpoint(dir / "model.ckpt", r.final_model, cfg.hash(), task.vocab().names());
        if (r.stage1_model) model::save_checkpoint(dir / "stage1.ckpt", *r.stage1_model, cfg.hash(), task.vocab().names());
        Json t{{"total", r.wall_seconds}};
        for (const auto& log : r.logs) t[log.stage] = log.wall_seconds;
        timing[seed_dir(r.seed)] = t;
      }
      write_json_file(out / "timing.json", timing);
      write_json_file(out / "aggregate.json", result.aggregate);
      if (uses_retrieval(cfg.method)) {
        const auto& stats = task.retrieval_stats();
        PlotSeries counts{"retrieved per concept", {}, {}, {}};
        for (std::size_t i = 0; i < stats.sorted_curve.size(); ++i) {
          counts.x.push_back(static_cast<double>(i + 1));
          counts.y.push_back(stats.sorted_curve[i]);
        }
        write_svg(out / "retrieval_counts.svg",
                  PlotSpec{"Retrieved examples per concept", "concept (sorted)", "count", {counts}});
      }
      if (result.curve) {
        write_text_file(out / "curve.csv", result.curve->to_csv());
        write_svg(out / "curve.svg", PlotSpec{"Stage-2 accuracy vs epochs", "epochs", "accuracy (%)",
                                              {result.curve->plot_series(std::string(to_string(cfg.method)))}});
      }
      if (cfg.eval.monitor_test) {
        PlotSpec spec{"Test accuracy during training", "epoch", "accuracy (%)", {}};
        for (const auto& r : result.runs) {
          for (const auto& log : r.logs) {
            PlotSeries s{log.stage + " seed " + std::to_string(r.seed), {}, log.epoch_test_acc, {}};
            for (std::size_t e = 0; e < log.epoch_test_acc.size(); ++e) s.x.push_back(static_cast<double>(e + 1));
            spec.series.push_back(std::move(s));
          }
        }
        write_svg(out / "test_accuracy.svg", spec);
      }
      return 0;
    });
  }
  return result;
}

std::vector<evaluation::ProbeResult> probe_domain_gap(const ExperimentConfig& cfg, const PreparedTask& task) {
  const auto embed = [&](const datasets::LabeledSet& set) {
    Matrix out(static_cast<Eigen::Index>(set.size()), task.embedder().image_dim());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      out.row(i) = task.embedder().embed_image(set.inputs.row(i).transpose()).transpose();
    }
    return out;
  };
  const Matrix downstream = embed(task.train_pool());
  std::vector<evaluation::ProbeResult> results;
  for (std::uint64_t seed : cfg.seeds) {
    const auto retrieved = task.retrieved(task.few_shot(seed), seed);
    evaluation::ProbeConfig pc = cfg.eval.probe;
    pc.seed = mix_seed(cfg.eval.probe.seed, seed);
    results.push_back(staged("probe", [&] { return evaluation::domain_gap_probe(downstream, embed(retrieved), pc); }));
  }
  return results;
}

}  // namespace swat::experiment
