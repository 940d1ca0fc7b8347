#include "swat/model/model.hpp"

#include <cmath>
#include <string>

#include "swat/core/error.hpp"

namespace swat::model {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kPretrained: return "pretrained";
    case Stage::kStage1: return "stage1";
    case Stage::kStage2: return "stage2";
  }
  return "?";
}

Stage stage_from_string(std::string_view text) {
  if (text == "pretrained") return Stage::kPretrained;
  if (text == "stage1") return Stage::kStage1;
  if (text == "stage2") return Stage::kStage2;
  throw InvalidArgument("unknown stage tag '" + std::string(text) + "'");
}

double ClassifierHead::temperature() const {
  const double tau = std::exp(log_temperature);
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw NumericError("classifier temperature must be positive and finite, got " + std::to_string(tau));
  }
  return tau;
}

ClassifierHead init_head_from_text(const retrieval::ConceptVocabulary& vocab,
                                   const retrieval::TextImageEmbedder& embedder, double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("initial temperature must be > 0");
  if (vocab.empty()) throw InvalidArgument("cannot build a classifier head for an empty vocabulary");
  ClassifierHead head;
  head.weights.resize(vocab.size(), embedder.text_dim());
  for (int c = 0; c < vocab.size(); ++c) {
    head.weights.row(c) = retrieval::concept_text_embedding(vocab, c, embedder).transpose();
  }
  head.log_temperature = std::log(temperature);
  return head;
}

Model::Model(std::unique_ptr<Encoder> encoder, ClassifierHead head, Stage stage)
    : encoder_(std::move(encoder)), head_(std::move(head)), stage_(stage) {
  if (!encoder_) throw InvalidArgument("model needs an encoder");
  if (head_.dim() != encoder_->output_dim()) {
    throw InvalidArgument("head dimension " + std::to_string(head_.dim()) + " differs from encoder output " +
                          std::to_string(encoder_->output_dim()));
  }
}

Model::Model(const Model& other)
    : encoder_(other.encoder_->clone()), head_(other.head_), stage_(other.stage_) {}

Model& Model::operator=(const Model& other) {
  if (this != &other) {
    encoder_ = other.encoder_->clone();
    head_ = other.head_;
    stage_ = other.stage_;
  }
  return *this;
}

Matrix Model::features(const Matrix& inputs) const { return encoder_->forward(inputs); }

Matrix Model::logits(const Matrix& inputs) const { return head_logits(features(inputs), head_); }

std::vector<int> Model::predict(const Matrix& inputs, Eigen::Index chunk) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(inputs.rows()));
  for (Eigen::Index start = 0; start < inputs.rows(); start += chunk) {
    const Eigen::Index n = std::min(chunk, inputs.rows() - start);
    const Matrix z = logits(inputs.middleRows(start, n));
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      z.row(i).maxCoeff(&best);
      out.push_back(static_cast<int>(best));
    }
  }
  return out;
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double n = m.row(i).norm();
    if (n > 0.0) out.row(i) /= n;
  }
  return out;
}

Matrix head_logits(const Matrix& features, const ClassifierHead& head) {
  const double scale = 1.0 / head.temperature();
  return scale * (normalize_rows(features) * normalize_rows(head.weights).transpose());
}

namespace {

// Gradient through row normalization u = v / |v|: (g - u <u, g>) / |v|.
Matrix normalize_rows_backward(const Matrix& raw, const Matrix& unit, const Matrix& grad_unit) {
  Matrix grad = grad_unit;
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double n = raw.row(i).norm();
    if (n > 0.0) {
      grad.row(i) = (grad_unit.row(i) - unit.row(i) * unit.row(i).dot(grad_unit.row(i))) / n;
    } else {
      grad.row(i).setZero();
    }
  }
  return grad;
}

}  // namespace

double head_loss_and_gradients(const Matrix& features, const ClassifierHead& head, const Matrix& soft_labels,
                               Matrix* grad_head, double* grad_log_temperature, Matrix* grad_features) {
  const Eigen::Index B = features.rows();
  if (B == 0) throw InvalidArgument("loss over an empty batch");
  if (soft_labels.rows() != B || soft_labels.cols() != head.num_classes()) {
    throw InvalidArgument("soft labels must be batch x classes");
  }
  if (features.cols() != head.dim()) throw InvalidArgument("feature dimension does not match the head");
  const double scale = 1.0 / head.temperature();
  const Matrix unit_f = normalize_rows(features);
  const Matrix unit_w = normalize_rows(head.weights);
  const Matrix cosine = unit_f * unit_w.transpose();
  const Matrix z = scale * cosine;

  double loss = 0.0;
  Matrix grad_z(B, z.cols());
  for (Eigen::Index b = 0; b < B; ++b) {
    const double zmax = z.row(b).maxCoeff();
    const RowVector e = (z.row(b).array() - zmax).exp().matrix();
    const double sum = e.sum();
    const double lse = zmax + std::log(sum);
    const double mass = soft_labels.row(b).sum();
    loss += mass * lse - soft_labels.row(b).dot(z.row(b));
    grad_z.row(b) = (e / sum) * mass - soft_labels.row(b);
  }
  loss /= static_cast<double>(B);
  grad_z /= static_cast<double>(B);

  if (grad_log_temperature != nullptr) {
    // dz/dlog_tau = -z
    *grad_log_temperature = -(grad_z.array() * z.array()).sum();
  }
  const Matrix grad_cos = scale * grad_z;
  if (grad_head != nullptr) {
    *grad_head = normalize_rows_backward(head.weights, unit_w, grad_cos.transpose() * unit_f);
  }
  if (grad_features != nullptr) {
    *grad_features = normalize_rows_backward(features, unit_f, grad_cos * unit_w);
  }
  return loss;
}

double loss_and_gradients(const Model& model, const Matrix& inputs, const Matrix& soft_labels, Gradients* grads,
                          GradientMask mask) {
  EncoderTape tape;
  const bool need_tape = grads != nullptr && mask.encoder;
  const Matrix features = model.encoder().forward(inputs, need_tape ? &tape : nullptr);
  if (grads == nullptr) {
    return head_loss_and_gradients(features, model.head(), soft_labels, nullptr, nullptr, nullptr);
  }
  Matrix grad_features;
  double grad_tau = 0.0;
  const double loss = head_loss_and_gradients(features, model.head(), soft_labels, mask.head ? &grads->head : nullptr,
                                              mask.temperature ? &grad_tau : nullptr,
                                              mask.encoder ? &grad_features : nullptr);
  grads->log_temperature = grad_tau;
  if (!mask.head) grads->head = Matrix::Zero(model.head().weights.rows(), model.head().weights.cols());
  grads->encoder = model.encoder().zero_gradients();
  if (mask.encoder) model.encoder().backward(tape, grad_features, grads->encoder);
  return loss;
}

}  // namespace swat::model
