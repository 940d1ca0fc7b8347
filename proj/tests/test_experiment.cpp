#include <fstream>

#include "swat/core/json_io.hpp"
#include "swat/experiment/experiment.hpp"
#include "swat/experiment/sweep.hpp"
#include "swat/model/checkpoint.hpp"
#include "test_util.hpp"

namespace swat::experiment {
namespace {

// Small enough that a full two-stage run takes well under a second.
Json tiny_config_json() {
  return Json{{"method", "swat"},
              {"task",
               {{"shots", 4},
                {"synthetic",
                 {{"num_concepts", 8},
                  {"dim", 12},
                  {"retrieval_size", 30},
                  {"train_per_class", 12},
                  {"test_per_class", 10},
                  {"seed", 3}}},
                {"pretrain", {{"hidden_dim", 24}, {"examples", 256}, {"epochs", 2}}}}},
              {"retrieval", {{"k", 20}}},
              {"train", {{"epochs_stage1", 2}, {"epochs_stage2", 2}, {"batch_size", 16}, {"warmup_iters", 2},
                         {"lr_encoder", 1e-3}}},
              {"seeds", {1, 2}},
              {"output_dir", "unused"}};
}

ExperimentConfig tiny_config(const std::filesystem::path& out) {
  auto cfg = config_from_json(tiny_config_json(), ".");
  cfg.output_dir = out;
  return cfg;
}

TEST(Config, DefaultsAreThePublishedRecipe) {
  const auto cfg = config_from_json(Json::object(), ".");
  EXPECT_EQ(cfg.method, Method::kSwat);
  EXPECT_EQ(cfg.train.lr_encoder, 1e-6);
  EXPECT_EQ(cfg.train.lr_head, 1e-4);
  EXPECT_EQ(cfg.train.weight_decay, 1e-2);
  EXPECT_EQ(cfg.train.batch_size, 32);
  EXPECT_EQ(cfg.train.warmup_iters, 50);
  EXPECT_EQ(cfg.train.epochs_stage1, 50);
  EXPECT_EQ(cfg.train.epochs_stage2, 10);
  EXPECT_EQ(cfg.train.temperature_stage2, 0.01);
  EXPECT_EQ(cfg.train.msda.method, augmentation::MsdaMethod::kCutMix);
  EXPECT_EQ(cfg.train.msda.alpha, 1.0);
  EXPECT_EQ(cfg.train.msda.prob, 0.5);
  EXPECT_EQ(cfg.task.shots, 16);
  EXPECT_TRUE(cfg.protocol_deviations().empty());
  // The resolved tree parses back to the same config.
  const auto again = config_from_json(cfg.to_json(), ".");
  EXPECT_EQ(again.to_json(), cfg.to_json());
}

TEST(Config, UnknownKeysNameTheirPath) {
  Json j = tiny_config_json();
  j["train"]["lr_encodre"] = 1e-5;
  auto msg = test::error_message<InvalidArgument>([&] { config_from_json(j, "."); });
  EXPECT_NE(msg.find("train.lr_encodre"), std::string::npos) << msg;

  j = tiny_config_json();
  j["task"]["synthetic"]["zipf"] = 1.0;
  msg = test::error_message<InvalidArgument>([&] { config_from_json(j, "."); });
  EXPECT_NE(msg.find("task.synthetic.zipf"), std::string::npos) << msg;

  j = tiny_config_json();
  j["sedes"] = Json::array({1});
  msg = test::error_message<InvalidArgument>([&] { config_from_json(j, "."); });
  EXPECT_NE(msg.find("sedes"), std::string::npos) << msg;
}

TEST(Config, RejectsInvalidValues) {
  const auto bad = [](const char* block, const char* key, Json value) {
    Json j = tiny_config_json();
    if (std::string(block).empty()) j[key] = std::move(value);
    else j[block][key] = std::move(value);
    return test::error_message<InvalidArgument>([&] { config_from_json(j, "."); });
  };
  EXPECT_NE(bad("train", "batch_size", 0).find("batch_size"), std::string::npos);
  EXPECT_NE(bad("train", "seed", 4).find("seeds"), std::string::npos);
  EXPECT_NE(bad("retrieval", "k", 0).find("retrieval.k"), std::string::npos);
  EXPECT_NE(bad("", "seeds", Json::array()).find("seeds"), std::string::npos);
  EXPECT_NE(bad("", "seeds", Json::array({1, 1})).find("twice"), std::string::npos);
  EXPECT_NE(bad("", "method", "swatt").find("swatt"), std::string::npos);
  EXPECT_NE(bad("eval", "curve_epochs", Json::array({10, 5})).find("curve_epochs"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/swat.json"), IoError);
}

TEST(Config, HashIgnoresOutputDir) {
  auto a = config_from_json(tiny_config_json(), ".");
  auto b = a;
  b.output_dir = "elsewhere";
  EXPECT_EQ(a.hash(), b.hash());
  b.train.lr_head = 2e-4;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, ProtocolDeviationsListChangedTrainingKeys) {
  const auto cfg = config_from_json(tiny_config_json(), ".");
  const auto dev = cfg.protocol_deviations();
  const auto has = [&](const std::string& prefix) {
    return std::any_of(dev.begin(), dev.end(), [&](const std::string& d) { return d.rfind(prefix, 0) == 0; });
  };
  EXPECT_TRUE(has("train.lr_encoder: "));
  EXPECT_TRUE(has("train.batch_size: 16"));
  EXPECT_FALSE(has("train.lr_head"));
}

TEST(Experiment, EverySeedRunsAndAggregatesInOrder) {
  test::TempDir tmp;
  auto cfg = tiny_config(tmp.path());
  cfg.seeds = {1, 2, 3};
  const auto result = run_experiment(cfg, RunOptions{false, 1});
  ASSERT_EQ(result.runs.size(), 3u);
  std::vector<double> overall;
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(result.runs[i].seed, cfg.seeds[i]);
    ASSERT_TRUE(result.runs[i].stage1_report.has_value());
    EXPECT_EQ(result.runs[i].logs.size(), 2u);
    overall.push_back(result.runs[i].report.overall_acc);
  }
  const auto& m = result.aggregate.at("metrics").at("overall_acc");
  const auto ms = evaluation::mean_std(overall);
  EXPECT_DOUBLE_EQ(m.at("mean").get<double>(), ms.mean);
  EXPECT_DOUBLE_EQ(m.at("std").get<double>(), ms.std);
  EXPECT_EQ(m.at("values").size(), 3u);
  EXPECT_EQ(result.aggregate.at("n_runs"), 3);
  EXPECT_EQ(result.aggregate.at("config_hash"), cfg.hash());
  EXPECT_TRUE(result.aggregate.contains("retrieval"));
  EXPECT_FALSE(std::filesystem::exists(tmp / "aggregate.json"));
}

TEST(Experiment, ZeroShotHeadScoresThePretrainedModel) {
  test::TempDir tmp;
  auto cfg = tiny_config(tmp.path());
  cfg.method = Method::kZeroShotHead;
  const auto task = PreparedTask::prepare(cfg);
  const auto result = run_experiment(cfg, task, RunOptions{false, 1});
  const auto direct = evaluation::evaluate(task.base_model(), task.test(), task.split());
  for (const auto& r : result.runs) {
    EXPECT_EQ(r.report.overall_acc, direct.overall_acc);
    EXPECT_TRUE(r.logs.empty());
  }
  EXPECT_FALSE(result.aggregate.contains("retrieval"));
}

TEST(Experiment, RerunIsBitIdenticalAndThreadCountDoesNotMatter) {
  test::TempDir tmp;
  const auto cfg = tiny_config(tmp.path());
  const auto a = run_experiment(cfg, RunOptions{false, 1});
  const auto b = run_experiment(cfg, RunOptions{false, 2});
  EXPECT_EQ(a.aggregate.dump(), b.aggregate.dump());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].final_model.head().weights, b.runs[i].final_model.head().weights);
    const auto pa = a.runs[i].final_model.encoder().parameters();
    const auto pb = b.runs[i].final_model.encoder().parameters();
    for (std::size_t p = 0; p < pa.size(); ++p) EXPECT_EQ(*pa[p], *pb[p]);
  }
}

TEST(Experiment, MethodsThatCannotCurveAreRejected) {
  test::TempDir tmp;
  auto cfg = tiny_config(tmp.path());
  cfg.method = Method::kFsft;
  cfg.eval.curve_epochs = {1, 2};
  EXPECT_THROW(run_experiment(cfg, RunOptions{false, 1}), InvalidArgument);
}

TEST(Experiment, WritesTheOutputTree) {
  test::TempDir tmp;
  auto cfg = tiny_config(tmp / "run");
  cfg.eval.curve_epochs = {1, 2};
  cfg.eval.monitor_test = true;
  const auto result = run_experiment(cfg);
  const auto out = tmp / "run";
  for (const char* f : {"config.json", "aggregate.json", "timing.json", "retrieval_counts.svg", "curve.csv", "curve.svg",
                        "test_accuracy.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  for (std::uint64_t seed : cfg.seeds) {
    const auto dir = out / ("seed_" + std::to_string(seed));
    const Json report = read_json_file(dir / "report.json");
    EXPECT_EQ(report.at("seed"), seed);
    EXPECT_EQ(report.at("method"), "swat");
    EXPECT_TRUE(report.contains("stage1"));
    EXPECT_TRUE(std::filesystem::exists(dir / "logs.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "stage1.ckpt"));
    const auto ckpt = model::load_checkpoint(dir / "model.ckpt");
    EXPECT_EQ(ckpt.config_hash, cfg.hash());
  }
  // Timing lives in its own file so the aggregate stays reproducible.
  const Json agg = read_json_file(out / "aggregate.json");
  EXPECT_FALSE(agg.dump().find("seconds") != std::string::npos);
  EXPECT_EQ(agg.at("curve").at("mean").size(), 2u);
  const auto reloaded = load_config(out / "config.json");
  EXPECT_EQ(reloaded.hash(), cfg.hash());
  ASSERT_TRUE(result.curve.has_value());
  // The last curve point uses the configured stage-2 epochs, so it matches the main run.
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    EXPECT_EQ(result.curve->per_seed.back()[i], result.runs[i].report.overall_acc);
  }
}

TEST(Sweep, AppliesValuesAndRejectsBadOnes) {
  const auto cfg = config_from_json(tiny_config_json(), ".");
  const auto k = apply_sweep_value(cfg, SweepAxis::kRetrievalK, 7);
  EXPECT_EQ(k.retrieval.k, 7);
  EXPECT_EQ(k.output_dir, cfg.output_dir / "retrieval_k_7");
  EXPECT_EQ(apply_sweep_value(cfg, SweepAxis::kMsdaMethod, "mixup").train.msda.method,
            augmentation::MsdaMethod::kMixUp);
  EXPECT_EQ(apply_sweep_value(cfg, SweepAxis::kStage1Epochs, 3).train.epochs_stage1, 3);
  EXPECT_EQ(*apply_sweep_value(cfg, SweepAxis::kFewShotRatio, 0.25).retrieval.fewshot_ratio, 0.25);
  EXPECT_THROW(apply_sweep_value(cfg, SweepAxis::kRetrievalK, 0), InvalidArgument);
  EXPECT_THROW(apply_sweep_value(cfg, SweepAxis::kRetrievalK, 2.5), InvalidArgument);
  EXPECT_THROW(apply_sweep_value(cfg, SweepAxis::kFewShotRatio, 1.5), InvalidArgument);
  EXPECT_THROW(apply_sweep_value(cfg, SweepAxis::kMsdaMethod, 3), InvalidArgument);
  auto zs = cfg;
  zs.method = Method::kZeroShotHead;
  EXPECT_THROW(apply_sweep_value(zs, SweepAxis::kRetrievalK, 5), InvalidArgument);
  EXPECT_THROW(sweep(cfg, SweepAxis::kRetrievalK, {}), InvalidArgument);
  EXPECT_THROW(parse_sweep_axis("k"), InvalidArgument);
}

TEST(Sweep, OneRowPerValueWithCsv) {
  test::TempDir tmp;
  auto cfg = tiny_config(tmp.path());
  cfg.seeds = {1};
  const auto r = sweep(cfg, SweepAxis::kRetrievalK, {Json(5), Json(20)});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].value, "5");
  EXPECT_EQ(r.rows[1].value, "20");
  EXPECT_TRUE(std::filesystem::exists(tmp / "sweep.json"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "sweep.svg"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "retrieval_k_5" / "aggregate.json"));
  std::ifstream csv(tmp / "sweep.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "retrieval_k,overall_mean,overall_std,common_mean,common_std,rare_mean,rare_std");
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  EXPECT_EQ(lines, 2);

  std::ifstream trend(tmp / "sweep_trend.csv");
  std::getline(trend, header);
  EXPECT_EQ(header, "retrieval_k,overall_mean,delta,delta_per_unit");
  std::string first, second;
  std::getline(trend, first);
  std::getline(trend, second);
  EXPECT_EQ(first.substr(first.size() - 2), ",,");
  const double m0 = r.rows[0].aggregate.at("metrics").at("overall_acc").at("mean").get<double>();
  const double m1 = r.rows[1].aggregate.at("metrics").at("overall_acc").at("mean").get<double>();
  const auto fields = second.substr(second.find(',') + 1);
  const double delta = std::stod(fields.substr(fields.find(',') + 1));
  EXPECT_NEAR(delta, m1 - m0, 1e-12);
}

TEST(Probe, OneResultPerSeed) {
  test::TempDir tmp;
  auto cfg = tiny_config(tmp.path());
  const auto task = PreparedTask::prepare(cfg);
  const auto results = probe_domain_gap(cfg, task);
  ASSERT_EQ(results.size(), 2u);
  for (const auto& r : results) {
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 100.0);
  }
}

}  // namespace
}  // namespace swat::experiment
