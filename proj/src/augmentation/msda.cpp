#include "swat/augmentation/msda.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swat/core/error.hpp"

namespace swat::augmentation {

MsdaMethod parse_msda_method(std::string_view text) {
  if (text == "none") return MsdaMethod::kNone;
  if (text == "cutmix") return MsdaMethod::kCutMix;
  if (text == "mixup") return MsdaMethod::kMixUp;
  if (text == "cutmix_strict") return MsdaMethod::kCutMixStrict;
  throw InvalidArgument("unknown msda method '" + std::string(text) + "' (none, cutmix, mixup, cutmix_strict)");
}

std::string_view to_string(MsdaMethod method) {
  switch (method) {
    case MsdaMethod::kNone: return "none";
    case MsdaMethod::kCutMix: return "cutmix";
    case MsdaMethod::kMixUp: return "mixup";
    case MsdaMethod::kCutMixStrict: return "cutmix_strict";
  }
  return "?";
}

namespace {

void check_params(double alpha, double prob) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("msda alpha must be > 0, got " + std::to_string(alpha));
  }
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidArgument("msda prob must lie in [0, 1], got " + std::to_string(prob));
}

void check_batch(const Batch& batch) {
  if (batch.inputs.rows() != batch.size() || batch.inputs.cols() != batch.shape.size()) {
    throw InvalidArgument("batch inputs do not match labels/shape");
  }
  for (int y : batch.labels) {
    if (y < 0 || y >= batch.num_classes) throw InvalidArgument("batch label out of range");
  }
}

void set_mixed_label(MixedBatch& out, const Batch& batch, int i, int partner, double lam) {
  out.labels.row(i).setZero();
  out.labels(i, batch.labels[static_cast<std::size_t>(i)]) += lam;
  out.labels(i, batch.labels[static_cast<std::size_t>(partner)]) += 1.0 - lam;
  out.lam[static_cast<std::size_t>(i)] = lam;
  out.pair_index[static_cast<std::size_t>(i)] = partner;
  out.applied[static_cast<std::size_t>(i)] = true;
}

// Copies the box of `partner` (from the original batch) into row i of out.
double paste_box(MixedBatch& out, const Batch& batch, int i, int partner, const Box& box) {
  const int H = batch.shape.height;
  const int W = batch.shape.width;
  const int plane = H * W;
  for (int c = 0; c < batch.shape.channels; ++c) {
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) {
        const int col = c * plane + y * W + x;
        out.inputs(i, col) = batch.inputs(partner, col);
      }
    }
  }
  return 1.0 - static_cast<double>(box.area()) / static_cast<double>(plane);
}

double paste_coordinates(MixedBatch& out, const Batch& batch, int i, int partner, std::span<const int> coords) {
  for (int d : coords) out.inputs(i, d) = batch.inputs(partner, d);
  return 1.0 - static_cast<double>(coords.size()) / static_cast<double>(batch.shape.size());
}

std::vector<int> sample_coordinates(int dim, double lam, Rng& rng) {
  const int m = static_cast<int>(std::lround((1.0 - lam) * dim));
  auto perm = random_permutation(rng, dim);
  perm.resize(static_cast<std::size_t>(std::clamp(m, 0, dim)));
  std::sort(perm.begin(), perm.end());
  return perm;
}

// One CutMix pair (i <- partner) with freshly sampled geometry.
void cutmix_row(MixedBatch& out, const Batch& batch, int i, int partner, double lam, Rng& rng) {
  double realized = 1.0;
  if (batch.shape.is_image()) {
    const Box box = sample_box(batch.shape.height, batch.shape.width, lam, rng);
    realized = paste_box(out, batch, i, partner, box);
  } else {
    const auto coords = sample_coordinates(batch.shape.size(), lam, rng);
    realized = paste_coordinates(out, batch, i, partner, coords);
  }
  set_mixed_label(out, batch, i, partner, realized);
}

}  // namespace

void MsdaConfig::validate() const { check_params(alpha, prob); }

Json MsdaConfig::to_json() const {
  return Json{{"method", to_string(method)}, {"alpha", alpha}, {"prob", prob}, {"per_batch", per_batch}};
}

MixedBatch passthrough(const Batch& batch) {
  check_batch(batch);
  const int B = batch.size();
  MixedBatch out;
  out.inputs = batch.inputs;
  out.labels = Matrix::Zero(B, batch.num_classes);
  out.lam.assign(static_cast<std::size_t>(B), 1.0);
  out.pair_index.resize(static_cast<std::size_t>(B));
  out.applied.assign(static_cast<std::size_t>(B), false);
  for (int i = 0; i < B; ++i) {
    out.labels(i, batch.labels[static_cast<std::size_t>(i)]) = 1.0;
    out.pair_index[static_cast<std::size_t>(i)] = i;
  }
  return out;
}

Box sample_box(int height, int width, double lam, Rng& rng) {
  const double cut_ratio = std::sqrt(std::clamp(1.0 - lam, 0.0, 1.0));
  const int cut_w = static_cast<int>(width * cut_ratio);
  const int cut_h = static_cast<int>(height * cut_ratio);
  const int cx = uniform_int(rng, 0, width - 1);
  const int cy = uniform_int(rng, 0, height - 1);
  Box box;
  box.x0 = std::clamp(cx - cut_w / 2, 0, width);
  box.x1 = std::clamp(cx + cut_w / 2, 0, width);
  box.y0 = std::clamp(cy - cut_h / 2, 0, height);
  box.y1 = std::clamp(cy + cut_h / 2, 0, height);
  return box;
}

MixedBatch cutmix_with_box(const Batch& batch, std::span<const int> pairs, const Box& box) {
  if (!batch.shape.is_image()) throw InvalidArgument("box CutMix needs image inputs");
  if (box.y0 < 0 || box.x0 < 0 || box.y1 > batch.shape.height || box.x1 > batch.shape.width || box.y1 < box.y0 ||
      box.x1 < box.x0) {
    throw InvalidArgument("CutMix box lies outside the image");
  }
  if (pairs.size() != static_cast<std::size_t>(batch.size())) throw InvalidArgument("one partner per row required");
  MixedBatch out = passthrough(batch);
  for (int i = 0; i < batch.size(); ++i) {
    const int partner = pairs[static_cast<std::size_t>(i)];
    set_mixed_label(out, batch, i, partner, paste_box(out, batch, i, partner, box));
  }
  return out;
}

MixedBatch cutmix_with_coordinates(const Batch& batch, std::span<const int> pairs, std::span<const int> coords) {
  if (pairs.size() != static_cast<std::size_t>(batch.size())) throw InvalidArgument("one partner per row required");
  for (int d : coords) {
    if (d < 0 || d >= batch.shape.size()) throw InvalidArgument("CutMix coordinate out of range");
  }
  MixedBatch out = passthrough(batch);
  for (int i = 0; i < batch.size(); ++i) {
    const int partner = pairs[static_cast<std::size_t>(i)];
    set_mixed_label(out, batch, i, partner, paste_coordinates(out, batch, i, partner, coords));
  }
  return out;
}

MixedBatch cutmix(const Batch& batch, double alpha, double prob, Rng& rng, bool per_batch) {
  check_params(alpha, prob);
  MixedBatch out = passthrough(batch);
  const int B = batch.size();
  if (B < 2) return out;
  if (per_batch) {
    if (!(uniform01(rng) < prob)) return out;
    const double lam = sample_beta(rng, alpha, alpha);
    const auto perm = random_permutation(rng, B);
    if (batch.shape.is_image()) {
      // One box for the whole batch.
      const Box box = sample_box(batch.shape.height, batch.shape.width, lam, rng);
      for (int i = 0; i < B; ++i) {
        const int partner = perm[static_cast<std::size_t>(i)];
        set_mixed_label(out, batch, i, partner, paste_box(out, batch, i, partner, box));
      }
    } else {
      const auto coords = sample_coordinates(batch.shape.size(), lam, rng);
      for (int i = 0; i < B; ++i) {
        const int partner = perm[static_cast<std::size_t>(i)];
        set_mixed_label(out, batch, i, partner, paste_coordinates(out, batch, i, partner, coords));
      }
    }
    return out;
  }
  const auto perm = random_permutation(rng, B);
  for (int i = 0; i < B; ++i) {
    if (!(uniform01(rng) < prob)) continue;
    const double lam = sample_beta(rng, alpha, alpha);
    cutmix_row(out, batch, i, perm[static_cast<std::size_t>(i)], lam, rng);
  }
  return out;
}

MixedBatch mixup(const Batch& batch, double alpha, double prob, Rng& rng, bool per_batch) {
  check_params(alpha, prob);
  MixedBatch out = passthrough(batch);
  const int B = batch.size();
  if (B < 2) return out;
  auto mix_row = [&](int i, int partner, double lam) {
    out.inputs.row(i) = lam * batch.inputs.row(i) + (1.0 - lam) * batch.inputs.row(partner);
    set_mixed_label(out, batch, i, partner, lam);
  };
  if (per_batch) {
    if (!(uniform01(rng) < prob)) return out;
    const double lam = sample_beta(rng, alpha, alpha);
    const auto perm = random_permutation(rng, B);
    for (int i = 0; i < B; ++i) mix_row(i, perm[static_cast<std::size_t>(i)], lam);
    return out;
  }
  const auto perm = random_permutation(rng, B);
  for (int i = 0; i < B; ++i) {
    if (!(uniform01(rng) < prob)) continue;
    mix_row(i, perm[static_cast<std::size_t>(i)], sample_beta(rng, alpha, alpha));
  }
  return out;
}

MixedBatch cutmix_strict(const Batch& batch, double alpha, double prob, Rng& rng) {
  check_params(alpha, prob);
  if (batch.sources.size() != static_cast<std::size_t>(batch.size())) {
    throw InvalidArgument("cutmix_strict needs a source flag for every example");
  }
  MixedBatch out = passthrough(batch);
  std::vector<int> fewshot;
  std::vector<int> retrieved;
  for (int i = 0; i < batch.size(); ++i) {
    (batch.sources[static_cast<std::size_t>(i)] == Source::kFewShot ? fewshot : retrieved).push_back(i);
  }
  if (fewshot.empty() || retrieved.empty()) return out;
  if (!(uniform01(rng) < prob)) return out;
  const double lam = sample_beta(rng, alpha, alpha);
  const int last = static_cast<int>(fewshot.size()) - 1;
  if (batch.shape.is_image()) {
    const Box box = sample_box(batch.shape.height, batch.shape.width, lam, rng);
    for (int i : retrieved) {
      const int partner = fewshot[static_cast<std::size_t>(uniform_int(rng, 0, last))];
      set_mixed_label(out, batch, i, partner, paste_box(out, batch, i, partner, box));
    }
  } else {
    const auto coords = sample_coordinates(batch.shape.size(), lam, rng);
    for (int i : retrieved) {
      const int partner = fewshot[static_cast<std::size_t>(uniform_int(rng, 0, last))];
      set_mixed_label(out, batch, i, partner, paste_coordinates(out, batch, i, partner, coords));
    }
  }
  return out;
}

MixedBatch apply_msda(const Batch& batch, const MsdaConfig& config, Rng& rng) {
  config.validate();
  switch (config.method) {
    case MsdaMethod::kNone: return passthrough(batch);
    case MsdaMethod::kCutMix: return cutmix(batch, config.alpha, config.prob, rng, config.per_batch);
    case MsdaMethod::kMixUp: return mixup(batch, config.alpha, config.prob, rng, config.per_batch);
    case MsdaMethod::kCutMixStrict: return cutmix_strict(batch, config.alpha, config.prob, rng);
  }
  return passthrough(batch);
}

}  // namespace swat::augmentation
