#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "swat/model/encoder.hpp"
#include "swat/retrieval/embedder.hpp"
#include "swat/retrieval/vocabulary.hpp"

namespace swat::model {

enum class Stage { kPretrained, kStage1, kStage2 };

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view text);

// Cosine classifier: logits = <f/|f|, w_c/|w_c|> / tau with tau = exp(log_tau).
struct ClassifierHead {
  Matrix weights;  // classes x dim
  double log_temperature = 0.0;

  double temperature() const;
  int num_classes() const { return static_cast<int>(weights.rows()); }
  int dim() const { return static_cast<int>(weights.cols()); }
};

// Rows are the unit-normalized mean prompt embeddings; throws for a concept
// without prompts.
ClassifierHead init_head_from_text(const retrieval::ConceptVocabulary& vocab,
                                   const retrieval::TextImageEmbedder& embedder, double temperature = 0.01);

class Model {
 public:
  Model(std::unique_ptr<Encoder> encoder, ClassifierHead head, Stage stage);
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;
  ~Model() = default;

  Encoder& encoder() { return *encoder_; }
  const Encoder& encoder() const { return *encoder_; }
  ClassifierHead& head() { return head_; }
  const ClassifierHead& head() const { return head_; }
  Stage stage() const { return stage_; }
  void set_stage(Stage stage) { stage_ = stage; }

  Matrix features(const Matrix& inputs) const;
  Matrix logits(const Matrix& inputs) const;
  std::vector<int> predict(const Matrix& inputs, Eigen::Index chunk = 1024) const;

 private:
  std::unique_ptr<Encoder> encoder_;
  ClassifierHead head_;
  Stage stage_;
};

// Logits of the cosine head for precomputed features.
Matrix head_logits(const Matrix& features, const ClassifierHead& head);

// Rows scaled to unit norm; zero rows stay zero.
Matrix normalize_rows(const Matrix& m);

struct Gradients {
  std::vector<Matrix> encoder;  // parallel to Encoder::parameters()
  Matrix head;
  double log_temperature = 0.0;
};

// Which parameter groups need gradients.
struct GradientMask {
  bool encoder = true;
  bool head = true;
  bool temperature = true;
};

// Mean soft-label cross entropy -sum_c y_c log softmax(z)_c over the batch.
// Fills `grads` (overwriting) for the groups enabled in `mask`.
double loss_and_gradients(const Model& model, const Matrix& inputs, const Matrix& soft_labels, Gradients* grads,
                          GradientMask mask = {});

// Same loss on precomputed features; gradient w.r.t. the features is
// returned through grad_features when non-null.
double head_loss_and_gradients(const Matrix& features, const ClassifierHead& head, const Matrix& soft_labels,
                               Matrix* grad_head, double* grad_log_temperature, Matrix* grad_features);

}  // namespace swat::model
