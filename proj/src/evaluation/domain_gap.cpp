#include "swat/evaluation/domain_gap.hpp"

#include <cmath>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/json_keys.hpp"
#include "swat/core/rng.hpp"

namespace swat::evaluation {

namespace {

constexpr int kMinPerSource = 20;
constexpr int kMinHeldOut = 5;

struct Split {
  std::vector<int> train;
  std::vector<int> test;
};

// Rows offset..offset+n-1 shuffled, the first round(n * fraction) held out.
void stratify(Split& split, int offset, int n, double fraction, Rng& rng, const char* name) {
  const auto perm = random_permutation(rng, n);
  const int held = static_cast<int>(std::lround(fraction * n));
  if (held < kMinHeldOut) {
    throw InvalidArgument(std::string("probe source ") + name + " has " + std::to_string(held) +
                          " held-out examples, need >= " + std::to_string(kMinHeldOut));
  }
  for (int i = 0; i < n; ++i) {
    (i < held ? split.test : split.train).push_back(offset + perm[static_cast<std::size_t>(i)]);
  }
}

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

void ProbeConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("probe.epochs must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("probe.lr must be > 0");
  if (batch_size < 1) throw InvalidArgument("probe.batch_size must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("probe.test_fraction must lie in (0, 1)");
}

Json ProbeConfig::to_json() const {
  return Json{{"epochs", epochs},           {"lr", lr},
              {"batch_size", batch_size},   {"test_fraction", test_fraction},
              {"standardize", standardize}, {"seed", seed}};
}

ProbeConfig ProbeConfig::from_json(const Json& j, const std::string& where) {
  ProbeConfig c;
  if (j.is_null()) return c;
  reject_unknown_keys(j, {"epochs", "lr", "batch_size", "test_fraction", "standardize", "seed"}, where);
  read_key(j, "epochs", c.epochs, where);
  read_key(j, "lr", c.lr, where);
  read_key(j, "batch_size", c.batch_size, where);
  read_key(j, "test_fraction", c.test_fraction, where);
  read_key(j, "standardize", c.standardize, where);
  read_key(j, "seed", c.seed, where);
  c.validate();
  return c;
}

Json ProbeResult::to_json() const { return Json{{"accuracy", accuracy}, {"n_train", n_train}, {"n_test", n_test}}; }

ProbeResult domain_gap_probe(const Matrix& a, const Matrix& b, const ProbeConfig& cfg) {
  cfg.validate();
  if (a.cols() != b.cols()) throw InvalidArgument("probe sources have different feature dimensions");
  if (a.rows() < kMinPerSource || b.rows() < kMinPerSource) {
    throw InvalidArgument("probe needs >= " + std::to_string(kMinPerSource) + " examples per source, got " +
                          std::to_string(a.rows()) + " and " + std::to_string(b.rows()));
  }
  const int na = static_cast<int>(a.rows());
  const int nb = static_cast<int>(b.rows());
  const auto D = a.cols();
  Matrix x(na + nb, D);
  x.topRows(na) = a;
  x.bottomRows(nb) = b;
  std::vector<double> y(static_cast<std::size_t>(na + nb), 0.0);
  for (int i = na; i < na + nb; ++i) y[static_cast<std::size_t>(i)] = 1.0;

  Rng rng(mix_seed(cfg.seed, 1));
  Split split;
  stratify(split, 0, na, cfg.test_fraction, rng, "a");
  stratify(split, na, nb, cfg.test_fraction, rng, "b");

  RowVector mean = RowVector::Zero(D);
  RowVector scale = RowVector::Ones(D);
  if (cfg.standardize) {
    for (int i : split.train) mean += x.row(i);
    mean /= static_cast<double>(split.train.size());
    RowVector var = RowVector::Zero(D);
    for (int i : split.train) var += (x.row(i) - mean).cwiseAbs2();
    var /= static_cast<double>(split.train.size());
    for (Eigen::Index d = 0; d < D; ++d) scale[d] = var[d] > 1e-12 ? 1.0 / std::sqrt(var[d]) : 1.0;
  }
  const auto features = [&](int i) -> RowVector { return (x.row(i) - mean).cwiseProduct(scale); };

  // Logistic regression with Adam.
  RowVector w = RowVector::Zero(D);
  double bias = 0.0;
  RowVector m_w = RowVector::Zero(D), v_w = RowVector::Zero(D);
  double m_b = 0.0, v_b = 0.0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  int t = 0;
  const int n_train = static_cast<int>(split.train.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = random_permutation(rng, n_train);
    for (int lo = 0; lo < n_train; lo += cfg.batch_size) {
      const int n = std::min(cfg.batch_size, n_train - lo);
      RowVector g_w = RowVector::Zero(D);
      double g_b = 0.0;
      for (int k = 0; k < n; ++k) {
        const int i = split.train[static_cast<std::size_t>(order[static_cast<std::size_t>(lo + k)])];
        const RowVector f = features(i);
        const double err = sigmoid(f.dot(w) + bias) - y[static_cast<std::size_t>(i)];
        g_w += err * f;
        g_b += err;
      }
      g_w /= n;
      g_b /= n;
      ++t;
      const double c1 = 1.0 - std::pow(b1, t);
      const double c2 = 1.0 - std::pow(b2, t);
      m_w = b1 * m_w + (1 - b1) * g_w;
      v_w = b2 * v_w + (1 - b2) * g_w.cwiseAbs2();
      m_b = b1 * m_b + (1 - b1) * g_b;
      v_b = b2 * v_b + (1 - b2) * g_b * g_b;
      w.array() -= cfg.lr * (m_w.array() / c1) / ((v_w.array() / c2).sqrt() + eps);
      bias -= cfg.lr * (m_b / c1) / (std::sqrt(v_b / c2) + eps);
    }
  }

  int correct = 0;
  for (int i : split.test) {
    const bool pred = features(i).dot(w) + bias > 0.0;
    if (pred == (y[static_cast<std::size_t>(i)] > 0.5)) ++correct;
  }
  ProbeResult r;
  r.n_train = n_train;
  r.n_test = static_cast<int>(split.test.size());
  r.accuracy = 100.0 * correct / r.n_test;
  return r;
}

}  // namespace swat::evaluation
