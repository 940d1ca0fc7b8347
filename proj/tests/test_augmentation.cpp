#include <numeric>

#include "swat/augmentation/msda.hpp"
#include "test_util.hpp"

namespace swat::augmentation {
namespace {

// Each row is a constant image whose value identifies the row.
Batch image_batch(int B, int C, int H, int W, int num_classes) {
  Batch b;
  b.shape = InputShape::image(C, H, W);
  b.num_classes = num_classes;
  b.inputs.resize(B, C * H * W);
  for (int i = 0; i < B; ++i) {
    b.inputs.row(i).setConstant(i + 1.0);
    b.labels.push_back(i % num_classes);
  }
  return b;
}

Batch feature_batch(int B, int D, int num_classes, std::uint64_t seed) {
  Rng rng(seed);
  Batch b;
  b.shape = InputShape::features(D);
  b.num_classes = num_classes;
  b.inputs.resize(B, D);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < B; ++i) {
    for (int d = 0; d < D; ++d) b.inputs(i, d) = n(rng);
    b.labels.push_back(uniform_int(rng, 0, num_classes - 1));
  }
  return b;
}

void expect_label_invariants(const MixedBatch& m, const Batch& b) {
  for (int i = 0; i < b.size(); ++i) {
    EXPECT_NEAR(m.labels.row(i).sum(), 1.0, 1e-6);
    EXPECT_LE((m.labels.row(i).array() != 0.0).count(), 2);
    const auto si = static_cast<std::size_t>(i);
    if (!m.applied[si]) {
      EXPECT_EQ(m.labels(i, b.labels[si]), 1.0);
      EXPECT_EQ(m.inputs.row(i), b.inputs.row(i));
    }
  }
}

TEST(CutMix, SixteenBoxOn32ImageGivesThreeQuarters) {
  Batch b = image_batch(2, 1, 32, 32, 3);
  b.labels = {0, 2};
  const std::vector<int> pairs{1, 0};
  const Box box{8, 8, 24, 24};
  const auto m = cutmix_with_box(b, pairs, box);
  // Count pasted pixels directly.
  int pasted = 0;
  for (int p = 0; p < 32 * 32; ++p) pasted += m.inputs(0, p) == 2.0;
  EXPECT_EQ(pasted, 256);
  EXPECT_EQ(m.lam[0], 0.75);
  EXPECT_DOUBLE_EQ(m.labels(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(m.labels(0, 2), 0.25);
  EXPECT_DOUBLE_EQ(m.labels(1, 2), 0.75);
  EXPECT_DOUBLE_EQ(m.labels(1, 0), 0.25);
}

TEST(CutMix, ZeroAreaBoxIsIdentity) {
  const Batch b = image_batch(3, 3, 8, 8, 3);
  const std::vector<int> pairs{2, 0, 1};
  const auto m = cutmix_with_box(b, pairs, Box{4, 4, 4, 4});
  EXPECT_EQ(m.inputs, b.inputs);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(m.lam[static_cast<std::size_t>(i)], 1.0);
    EXPECT_EQ(m.labels(i, b.labels[static_cast<std::size_t>(i)]), 1.0);
  }
  EXPECT_THROW(cutmix_with_box(b, pairs, Box{0, 0, 9, 4}), InvalidArgument);
}

TEST(CutMix, RandomBoxesHaveAreaExactLabels) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const Batch b = image_batch(4, 1, 32, 32, 4);
    const double lam = uniform01(rng);
    const Box box = sample_box(32, 32, lam, rng);
    ASSERT_GE(box.y0, 0);
    ASSERT_LE(box.y1, 32);
    ASSERT_GE(box.x0, 0);
    ASSERT_LE(box.x1, 32);
    const std::vector<int> pairs{1, 2, 3, 0};
    const auto m = cutmix_with_box(b, pairs, box);
    for (int i = 0; i < 4; ++i) {
      int pasted = 0;
      for (int p = 0; p < 1024; ++p) pasted += m.inputs(i, p) != b.inputs(i, p);
      const double want = 1.0 - pasted / 1024.0;
      EXPECT_EQ(m.lam[static_cast<std::size_t>(i)], want);
      EXPECT_NEAR(m.labels(i, i), want, 1e-12);
      EXPECT_NEAR(m.labels(i, (i + 1) % 4), 1.0 - want, 1e-12);
    }
  }
}

TEST(CutMix, FeatureModeCopiesRoundedCoordinateCount) {
  const Batch b = feature_batch(6, 40, 3, 1);
  Rng rng(2);
  int fired = 0;
  for (int t = 0; t < 50; ++t) {
    const auto m = cutmix(b, 1.0, 1.0, rng);
    expect_label_invariants(m, b);
    for (int i = 0; i < b.size(); ++i) {
      const int partner = m.pair_index[static_cast<std::size_t>(i)];
      if (partner == i) continue;
      ++fired;
      int copied = 0;
      for (int d = 0; d < 40; ++d) {
        if (m.inputs(i, d) != b.inputs(i, d)) {
          EXPECT_EQ(m.inputs(i, d), b.inputs(partner, d));
          ++copied;
        }
      }
      EXPECT_EQ(m.lam[static_cast<std::size_t>(i)], 1.0 - copied / 40.0);
    }
  }
  EXPECT_GT(fired, 0);
  const std::vector<int> pairs{1, 0, 3, 2, 5, 4};
  const std::vector<int> coords{0, 5, 9, 30};
  const auto m = cutmix_with_coordinates(b, pairs, coords);
  EXPECT_EQ(m.lam[0], 0.9);
  EXPECT_EQ(m.inputs(0, 5), b.inputs(1, 5));
  EXPECT_EQ(m.inputs(0, 6), b.inputs(0, 6));
}

TEST(CutMix, FiringRateMatchesProbability) {
  const Batch b = feature_batch(4, 8, 2, 3);
  for (double prob : {0.5, 0.2}) {
    Rng rng(99);
    int fired = 0;
    for (int t = 0; t < 10000; ++t) fired += cutmix(b, 1.0, prob, rng).applied[0];
    EXPECT_NEAR(fired / 10000.0, prob, 0.02);
  }
}

TEST(CutMix, PerExampleModeFlipsIndependently) {
  const Batch b = feature_batch(200, 8, 2, 3);
  Rng rng(5);
  const auto m = cutmix(b, 1.0, 0.5, rng, false);
  const auto applied = std::count(m.applied.begin(), m.applied.end(), true);
  EXPECT_GT(applied, 60);
  EXPECT_LT(applied, 140);
  expect_label_invariants(m, b);
}

TEST(CutMix, ProbZeroAndSeedReproducibility) {
  const Batch b = image_batch(8, 3, 16, 16, 5);
  Rng rng(1);
  const auto off = cutmix(b, 1.0, 0.0, rng);
  EXPECT_EQ(off.inputs, b.inputs);
  expect_label_invariants(off, b);
  Rng r1(42);
  Rng r2(42);
  const auto a = cutmix(b, 1.0, 1.0, r1);
  const auto c = cutmix(b, 1.0, 1.0, r2);
  EXPECT_EQ(a.inputs, c.inputs);
  EXPECT_EQ(a.labels, c.labels);
  EXPECT_EQ(a.pair_index, c.pair_index);
}

TEST(CutMix, ParameterValidation) {
  const Batch b = image_batch(2, 1, 4, 4, 2);
  Rng rng(0);
  EXPECT_THROW(cutmix(b, 0.0, 0.5, rng), InvalidArgument);
  EXPECT_THROW(cutmix(b, 1.0, 1.5, rng), InvalidArgument);
  EXPECT_THROW(cutmix(b, 1.0, -0.1, rng), InvalidArgument);
  EXPECT_THROW(mixup(b, -1.0, 0.5, rng), InvalidArgument);
  EXPECT_THROW(parse_msda_method("saliencymix"), InvalidArgument);
  for (auto m : {MsdaMethod::kNone, MsdaMethod::kCutMix, MsdaMethod::kMixUp, MsdaMethod::kCutMixStrict}) {
    EXPECT_EQ(parse_msda_method(to_string(m)), m);
  }
}

TEST(MixUp, ConvexCombinationWithSampledLambda) {
  const Batch b = feature_batch(10, 5, 4, 8);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto m = mixup(b, 1.0, 1.0, rng);
    expect_label_invariants(m, b);
    for (int i = 0; i < b.size(); ++i) {
      const auto si = static_cast<std::size_t>(i);
      const double lam = m.lam[si];
      const int j = m.pair_index[si];
      EXPECT_TRUE((m.inputs.row(i) - (lam * b.inputs.row(i) + (1 - lam) * b.inputs.row(j))).isZero(1e-12));
      RowVector want = RowVector::Zero(4);
      want[b.labels[si]] += lam;
      want[b.labels[static_cast<std::size_t>(j)]] += 1 - lam;
      EXPECT_TRUE((m.labels.row(i) - want).isZero(1e-12));
    }
  }
  Rng off(0);
  EXPECT_EQ(mixup(b, 1.0, 0.0, off).inputs, b.inputs);
}

TEST(CutMixStrict, GuardsAndDirection) {
  Batch b = image_batch(2, 1, 8, 8, 2);
  Rng rng(0);
  EXPECT_THROW(cutmix_strict(b, 1.0, 1.0, rng), InvalidArgument);
  b.sources = {Source::kRetrieved, Source::kRetrieved};
  EXPECT_EQ(cutmix_strict(b, 1.0, 1.0, rng).inputs, b.inputs);
  b.sources = {Source::kFewShot, Source::kFewShot};
  EXPECT_EQ(cutmix_strict(b, 1.0, 1.0, rng).inputs, b.inputs);

  b.sources = {Source::kFewShot, Source::kRetrieved};
  int patched = 0;
  for (int t = 0; t < 50; ++t) {
    const auto m = cutmix_strict(b, 1.0, 1.0, rng);
    EXPECT_EQ(m.inputs.row(0), b.inputs.row(0));
    EXPECT_FALSE(m.applied[0]);
    ASSERT_TRUE(m.applied[1]);
    EXPECT_EQ(m.pair_index[1], 0);
    int pasted = 0;
    for (int p = 0; p < 64; ++p) {
      if (m.inputs(1, p) != b.inputs(1, p)) {
        EXPECT_EQ(m.inputs(1, p), b.inputs(0, p));
        ++pasted;
      }
    }
    patched += pasted > 0;
    EXPECT_EQ(m.lam[1], 1.0 - pasted / 64.0);
  }
  EXPECT_GT(patched, 0);
}

TEST(ApplyMsda, DispatchesOnMethod) {
  const Batch b = feature_batch(6, 4, 3, 1);
  MsdaConfig cfg;
  cfg.method = MsdaMethod::kNone;
  Rng rng(0);
  const auto m = apply_msda(b, cfg, rng);
  EXPECT_EQ(m.inputs, b.inputs);
  EXPECT_EQ(std::count(m.applied.begin(), m.applied.end(), true), 0);
  cfg.method = MsdaMethod::kMixUp;
  cfg.prob = 1.0;
  EXPECT_NE(apply_msda(b, cfg, rng).inputs, b.inputs);
  cfg.prob = 2.0;
  EXPECT_THROW(apply_msda(b, cfg, rng), InvalidArgument);
}

}  // namespace
}  // namespace swat::augmentation
