#include "swat/model/pretrain.hpp"

#include <cmath>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/json_keys.hpp"
#include "swat/core/rng.hpp"
#include "swat/retrieval/embedder.hpp"
#include "swat/training/optimizer.hpp"

namespace swat::model {

namespace {

constexpr std::uint64_t kPretrainTaskStream = 0x70726574;  // "pret"

}  // namespace

void PretrainConfig::validate() const {
  if (hidden_dim < 1) throw InvalidArgument("pretrain.hidden_dim must be >= 1");
  if (examples < 1) throw InvalidArgument("pretrain.examples must be >= 1");
  if (epochs < 0) throw InvalidArgument("pretrain.epochs must be >= 0");
  if (batch_size < 1) throw InvalidArgument("pretrain.batch_size must be >= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("pretrain.lr must be finite and >= 0");
}

Json PretrainConfig::to_json() const {
  return Json{{"hidden_dim", hidden_dim}, {"examples", examples}, {"epochs", epochs},
              {"batch_size", batch_size}, {"lr", lr},             {"seed", seed}};
}

PretrainConfig PretrainConfig::from_json(const Json& j, const std::string& where) {
  PretrainConfig c;
  if (j.is_null()) return c;
  reject_unknown_keys(j, {"hidden_dim", "examples", "epochs", "batch_size", "lr", "seed"}, where);
  read_key(j, "hidden_dim", c.hidden_dim, where);
  read_key(j, "examples", c.examples, where);
  read_key(j, "epochs", c.epochs, where);
  read_key(j, "batch_size", c.batch_size, where);
  read_key(j, "lr", c.lr, where);
  read_key(j, "seed", c.seed, where);
  c.validate();
  return c;
}

double pretrain_regression(Encoder& encoder, const Matrix& inputs, const Matrix& targets, const PretrainConfig& cfg) {
  cfg.validate();
  if (inputs.rows() != targets.rows() || targets.cols() != encoder.output_dim()) {
    throw InvalidArgument("pretrain targets must be rows x encoder output");
  }
  const int N = static_cast<int>(inputs.rows());
  if (N == 0) throw InvalidArgument("pretrain needs data");
  Rng rng(mix_seed(cfg.seed, 1));
  training::AdamW opt;
  double last = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = random_permutation(rng, N);
    double sum = 0.0;
    int batches = 0;
    for (int lo = 0; lo < N; lo += cfg.batch_size) {
      const int n = std::min(cfg.batch_size, N - lo);
      Matrix x(n, inputs.cols());
      Matrix t(n, targets.cols());
      for (int i = 0; i < n; ++i) {
        x.row(i) = inputs.row(order[static_cast<std::size_t>(lo + i)]);
        t.row(i) = targets.row(order[static_cast<std::size_t>(lo + i)]);
      }
      EncoderTape tape;
      const Matrix diff = encoder.forward(x, &tape) - t;
      sum += diff.squaredNorm() / n;
      ++batches;
      auto grads = encoder.zero_gradients();
      encoder.backward(tape, (2.0 / n) * diff, grads);
      auto params = encoder.parameters();
      opt.step(params, grads, cfg.lr, 0.0);
    }
    last = sum / batches;
    if (!std::isfinite(last)) throw NumericError("pretrain diverged at epoch " + std::to_string(epoch + 1));
  }
  return last;
}

Model pretrained_synthetic_model(const datasets::SyntheticTaskSpec& task, const PretrainConfig& cfg,
                                 double temperature_init) {
  cfg.validate();
  task.validate();
  datasets::SyntheticTaskSpec source = task;
  source.seed = mix_seed(task.seed ^ cfg.seed, kPretrainTaskStream);
  source.train_per_class = std::max(1, (cfg.examples + source.num_concepts - 1) / source.num_concepts);
  source.test_per_class = 1;
  source.retrieval_size = 1;
  const auto pool = datasets::generate_synthetic_task(source).train_pool;

  auto encoder = std::make_unique<MlpEncoder>(task.dim, cfg.hidden_dim, task.dim, mix_seed(cfg.seed, 2));
  pretrain_regression(*encoder, pool.inputs, pool.inputs, cfg);

  const auto vocab = retrieval::ConceptVocabulary::numbered(task.num_concepts);
  const retrieval::ToyEmbedder embedder(task.dim, datasets::synthetic_embedder_seed(task));
  return Model(std::move(encoder), init_head_from_text(vocab, embedder, temperature_init), Stage::kPretrained);
}

}  // namespace swat::model
