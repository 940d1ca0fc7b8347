#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/core/rng.hpp"
#include "swat/core/types.hpp"

namespace swat::augmentation {

enum class MsdaMethod { kNone, kCutMix, kMixUp, kCutMixStrict };

MsdaMethod parse_msda_method(std::string_view text);
std::string_view to_string(MsdaMethod method);

struct MsdaConfig {
  MsdaMethod method = MsdaMethod::kCutMix;
  double alpha = 1.0;     // Beta(alpha, alpha); 1.0 is Uniform(0, 1)
  double prob = 0.5;      // chance that mixing fires
  bool per_batch = true;  // one coin flip per batch instead of per example

  void validate() const;
  Json to_json() const;
};

// A batch before augmentation. `sources` may be empty except for cutmix_strict.
struct Batch {
  InputShape shape;
  Matrix inputs;  // B x shape.size()
  std::vector<int> labels;
  std::vector<Source> sources;
  int num_classes = 0;

  int size() const { return static_cast<int>(labels.size()); }
};

struct MixedBatch {
  Matrix inputs;                 // B x shape.size()
  Matrix labels;                 // B x C soft labels, rows sum to 1
  std::vector<double> lam;       // realized weight of the example's own label
  std::vector<int> pair_index;   // partner row; i itself when not mixed
  std::vector<bool> applied;
};

// Half-open pixel rectangle [y0, y1) x [x0, x1).
struct Box {
  int y0 = 0;
  int x0 = 0;
  int y1 = 0;
  int x1 = 0;

  int area() const { return (y1 - y0) * (x1 - x0); }
};

// One-hot labels, inputs untouched.
MixedBatch passthrough(const Batch& batch);

// Box of side ~ sqrt(1 - lam) times the image side, centred uniformly and
// clipped to the image.
Box sample_box(int height, int width, double lam, Rng& rng);

// Deterministic core of CutMix for images: row i receives the box from row
// pairs[i] (read from the unmodified batch); lam = 1 - area / (H W).
MixedBatch cutmix_with_box(const Batch& batch, std::span<const int> pairs, const Box& box);

// Feature-vector CutMix: row i receives coordinates `coords` from pairs[i];
// lam = 1 - |coords| / D.
MixedBatch cutmix_with_coordinates(const Batch& batch, std::span<const int> pairs, std::span<const int> coords);

MixedBatch cutmix(const Batch& batch, double alpha, double prob, Rng& rng, bool per_batch = true);
MixedBatch mixup(const Batch& batch, double alpha, double prob, Rng& rng, bool per_batch = true);

// Cuts patches only from few-shot rows and pastes them only into retrieved
// rows. Fires only when both sources are present.
MixedBatch cutmix_strict(const Batch& batch, double alpha, double prob, Rng& rng);

MixedBatch apply_msda(const Batch& batch, const MsdaConfig& config, Rng& rng);

}  // namespace swat::augmentation
