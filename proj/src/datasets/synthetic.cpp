#include "swat/datasets/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/json_keys.hpp"
#include "swat/core/rng.hpp"
#include "swat/retrieval/embedder.hpp"

namespace swat::datasets {

namespace {

enum Stream : std::uint64_t { kEmbedder = 1, kMeans, kShift, kPopularity, kTrain, kRetrieved, kTest, kNoise };

Vector gaussian(Rng& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

void draw_examples(LabeledSet& set, Rng& rng, int label, const Vector& mean, double sigma, int count,
                   Source source, const std::string& prefix) {
  std::normal_distribution<double> normal(0.0, sigma);
  const auto start = set.inputs.rows();
  set.inputs.conservativeResize(start + count, mean.size());
  for (int i = 0; i < count; ++i) {
    for (Eigen::Index d = 0; d < mean.size(); ++d) set.inputs(start + i, d) = mean[d] + normal(rng);
    set.labels.push_back(label);
    set.sources.push_back(source);
    set.ids.push_back(prefix + "/" + std::to_string(label) + "/" + std::to_string(i));
  }
}

}  // namespace

void SyntheticTaskSpec::validate() const {
  if (num_concepts < 2) throw InvalidArgument("synthetic task needs num_concepts >= 2");
  if (dim < 2) throw InvalidArgument("synthetic task needs dim >= 2");
  if (!(zipf_s >= 0.0)) throw InvalidArgument("zipf_s must be >= 0");
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) throw InvalidArgument("noise_rate must lie in [0, 1)");
  if (!(domain_shift >= 0.0)) throw InvalidArgument("domain_shift must be >= 0");
  if (retrieval_size < 1 || train_per_class < 1 || test_per_class < 1) {
    throw InvalidArgument("synthetic per-class sizes must be >= 1");
  }
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (!(class_separation > 0.0)) throw InvalidArgument("class_separation must be > 0");
  if (!(text_noise >= 0.0)) throw InvalidArgument("text_noise must be >= 0");
  if (!(shift_correlation >= 0.0 && shift_correlation <= 1.0)) {
    throw InvalidArgument("shift_correlation must lie in [0, 1]");
  }
}

Json SyntheticTaskSpec::to_json() const {
  return Json{{"num_concepts", num_concepts},       {"dim", dim},
              {"domain_shift", domain_shift},       {"zipf_s", zipf_s},
              {"noise_rate", noise_rate},           {"seed", seed},
              {"retrieval_size", retrieval_size},   {"train_per_class", train_per_class},
              {"test_per_class", test_per_class},   {"sigma", sigma},
              {"class_separation", class_separation}, {"text_noise", text_noise},
              {"shift_correlation", shift_correlation}};
}

SyntheticTaskSpec SyntheticTaskSpec::from_json(const Json& j, const std::string& where) {
  SyntheticTaskSpec s;
  if (j.is_null()) return s;
  reject_unknown_keys(j,
                      {"num_concepts", "dim", "domain_shift", "zipf_s", "noise_rate", "seed", "retrieval_size",
                       "train_per_class", "test_per_class", "sigma", "class_separation", "text_noise",
                       "shift_correlation"},
                      where);
  read_key(j, "num_concepts", s.num_concepts, where);
  read_key(j, "dim", s.dim, where);
  read_key(j, "domain_shift", s.domain_shift, where);
  read_key(j, "zipf_s", s.zipf_s, where);
  read_key(j, "noise_rate", s.noise_rate, where);
  read_key(j, "seed", s.seed, where);
  read_key(j, "retrieval_size", s.retrieval_size, where);
  read_key(j, "train_per_class", s.train_per_class, where);
  read_key(j, "test_per_class", s.test_per_class, where);
  read_key(j, "sigma", s.sigma, where);
  read_key(j, "class_separation", s.class_separation, where);
  read_key(j, "text_noise", s.text_noise, where);
  read_key(j, "shift_correlation", s.shift_correlation, where);
  s.validate();
  return s;
}

std::vector<int> zipf_counts(int num_concepts, int cap, double s) {
  std::vector<int> counts(static_cast<std::size_t>(num_concepts));
  for (int r = 1; r <= num_concepts; ++r) {
    const double v = std::round(static_cast<double>(cap) * std::pow(static_cast<double>(r), -s));
    counts[static_cast<std::size_t>(r - 1)] = std::max(1, static_cast<int>(v));
  }
  return counts;
}

std::uint64_t synthetic_embedder_seed(const SyntheticTaskSpec& spec) { return mix_seed(spec.seed, kEmbedder); }

SyntheticTask generate_synthetic_task(const SyntheticTaskSpec& spec) {
  spec.validate();
  const int C = spec.num_concepts;
  const int D = spec.dim;
  SyntheticTask task;
  task.spec = spec;
  task.vocab = retrieval::ConceptVocabulary::numbered(C);
  const retrieval::ToyEmbedder embedder(D, synthetic_embedder_seed(spec));

  // Class means sit near (not on) their prompt embeddings, so the text-initialized
  // head is informative but imperfect.
  Rng mean_rng(mix_seed(spec.seed, kMeans));
  std::vector<Vector> means;
  for (int c = 0; c < C; ++c) {
    const Vector text = retrieval::concept_text_embedding(task.vocab, c, embedder);
    const Vector jitter = gaussian(mean_rng, D) / std::sqrt(static_cast<double>(D));
    means.push_back(spec.class_separation * retrieval::unit_normalized(text + spec.text_noise * jitter));
  }

  // Per-class shift directions share a common component (source style).
  Rng shift_rng(mix_seed(spec.seed, kShift));
  const Vector shared = retrieval::unit_normalized(gaussian(shift_rng, D));
  std::vector<Vector> shifts;
  const double rho = spec.shift_correlation;
  for (int c = 0; c < C; ++c) {
    Vector own = gaussian(shift_rng, D);
    own -= own.dot(shared) * shared;
    const Vector dir = rho * shared + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * retrieval::unit_normalized(own);
    shifts.push_back(spec.domain_shift * spec.sigma * dir);
  }

  // Popularity rank -> class assignment.
  Rng pop_rng(mix_seed(spec.seed, kPopularity));
  const auto order = random_permutation(pop_rng, C);
  const auto by_rank = zipf_counts(C, spec.retrieval_size, spec.zipf_s);
  task.retrieved_counts.assign(static_cast<std::size_t>(C), 0);
  for (int r = 0; r < C; ++r) {
    task.retrieved_counts[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] =
        by_rank[static_cast<std::size_t>(r)];
  }

  const auto names = task.vocab.names();
  const InputShape shape = InputShape::features(D);
  task.train_pool = LabeledSet::empty(shape, names);
  task.retrieved = LabeledSet::empty(shape, names);
  task.test = LabeledSet::empty(shape, names);
  Rng train_rng(mix_seed(spec.seed, kTrain));
  Rng retr_rng(mix_seed(spec.seed, kRetrieved));
  Rng test_rng(mix_seed(spec.seed, kTest));
  for (int c = 0; c < C; ++c) {
    const auto& mu = means[static_cast<std::size_t>(c)];
    draw_examples(task.train_pool, train_rng, c, mu, spec.sigma, spec.train_per_class, Source::kFewShot, "train");
    draw_examples(task.retrieved, retr_rng, c, mu + shifts[static_cast<std::size_t>(c)], spec.sigma,
                  task.retrieved_counts[static_cast<std::size_t>(c)], Source::kRetrieved, "retrieved");
    draw_examples(task.test, test_rng, c, mu, spec.sigma, spec.test_per_class, Source::kFewShot, "test");
  }

  if (spec.noise_rate > 0.0) {
    Rng noise_rng(mix_seed(spec.seed, kNoise));
    const auto n = static_cast<int>(task.retrieved.size());
    const int n_noisy = static_cast<int>(std::round(spec.noise_rate * n));
    auto rows = random_permutation(noise_rng, n);
    for (int i = 0; i < n_noisy; ++i) {
      auto& y = task.retrieved.labels[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
      const int other = uniform_int(noise_rng, 0, C - 2);
      y = other >= y ? other + 1 : other;
    }
  }
  return task;
}

}  // namespace swat::datasets
