#include "swat/model/encoder.hpp"

#include <cmath>
#include <random>

#include "swat/core/error.hpp"
#include "swat/core/hashing.hpp"
#include "swat/core/rng.hpp"

namespace swat::model {

namespace {

void fill_normal(Matrix& m, Rng& rng, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
}

void check_input(const Matrix& inputs, int expected, const char* who) {
  if (inputs.cols() != expected) {
    throw InvalidArgument(std::string(who) + " expects inputs of size " + std::to_string(expected) + ", got " +
                          std::to_string(inputs.cols()));
  }
}

}  // namespace

std::vector<const Matrix*> Encoder::parameters() const {
  auto mutable_params = const_cast<Encoder*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::vector<Matrix> Encoder::zero_gradients() const {
  std::vector<Matrix> grads;
  for (const Matrix* p : parameters()) grads.push_back(Matrix::Zero(p->rows(), p->cols()));
  return grads;
}

std::string Encoder::parameter_hash() const {
  Fnv1a h;
  for (const Matrix* p : parameters()) h.update(*p);
  return h.hex();
}

// ---------------------------------------------------------------------------

MlpEncoder::MlpEncoder(int input_dim, int hidden_dim, int output_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 1) throw InvalidArgument("MLP dimensions must be positive");
  Rng rng(seed);
  w1_.resize(hidden_dim, input_dim);
  w2_.resize(output_dim, hidden_dim);
  fill_normal(w1_, rng, std::sqrt(2.0 / input_dim));
  fill_normal(w2_, rng, std::sqrt(1.0 / hidden_dim));
  b1_ = Matrix::Zero(1, hidden_dim);
  b2_ = Matrix::Zero(1, output_dim);
}

Matrix MlpEncoder::forward(const Matrix& inputs, EncoderTape* tape) const {
  check_input(inputs, static_cast<int>(w1_.cols()), "MLP encoder");
  Matrix pre = inputs * w1_.transpose();
  pre.rowwise() += b1_.row(0);
  Matrix hidden = pre.cwiseMax(0.0);
  Matrix out = hidden * w2_.transpose();
  out.rowwise() += b2_.row(0);
  if (tape != nullptr) tape->saved = {inputs, std::move(pre), std::move(hidden)};
  return out;
}

void MlpEncoder::backward(const EncoderTape& tape, const Matrix& grad_out, std::vector<Matrix>& grads) const {
  const Matrix& inputs = tape.saved.at(0);
  const Matrix& pre = tape.saved.at(1);
  const Matrix& hidden = tape.saved.at(2);
  grads[2].noalias() += grad_out.transpose() * hidden;
  grads[3] += grad_out.colwise().sum();
  Matrix grad_hidden = grad_out * w2_;
  grad_hidden.array() *= (pre.array() > 0.0).cast<double>();
  grads[0].noalias() += grad_hidden.transpose() * inputs;
  grads[1] += grad_hidden.colwise().sum();
}

Json MlpEncoder::architecture() const {
  return Json{{"kind", "mlp"}, {"input_dim", w1_.cols()}, {"hidden_dim", w1_.rows()}, {"output_dim", w2_.rows()}};
}

// ---------------------------------------------------------------------------

ConvEncoder::ConvEncoder(InputShape input, int filters, int output_dim, std::uint64_t seed) : input_(input) {
  if (!input.is_image()) throw InvalidArgument("conv encoder needs image inputs");
  if (filters < 1 || output_dim < 1) throw InvalidArgument("conv encoder dimensions must be positive");
  Rng rng(seed);
  const int fan_in = input.channels * 9;
  kernel_.resize(filters, fan_in);
  fill_normal(kernel_, rng, std::sqrt(2.0 / fan_in));
  kernel_bias_ = Matrix::Zero(1, filters);
  w_out_.resize(output_dim, filters);
  fill_normal(w_out_, rng, std::sqrt(1.0 / filters));
  b_out_ = Matrix::Zero(1, output_dim);
}

Matrix ConvEncoder::im2col(const Matrix& inputs, Eigen::Index row) const {
  const int C = input_.channels;
  const int H = input_.height;
  const int W = input_.width;
  Matrix patches = Matrix::Zero(H * W, C * 9);
  for (int c = 0; c < C; ++c) {
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        for (int ky = -1; ky <= 1; ++ky) {
          const int sy = y + ky;
          if (sy < 0 || sy >= H) continue;
          for (int kx = -1; kx <= 1; ++kx) {
            const int sx = x + kx;
            if (sx < 0 || sx >= W) continue;
            patches(y * W + x, c * 9 + (ky + 1) * 3 + (kx + 1)) = inputs(row, c * H * W + sy * W + sx);
          }
        }
      }
    }
  }
  return patches;
}

Matrix ConvEncoder::forward(const Matrix& inputs, EncoderTape* tape) const {
  check_input(inputs, input_.size(), "conv encoder");
  const Eigen::Index B = inputs.rows();
  const Eigen::Index P = static_cast<Eigen::Index>(input_.height) * input_.width;
  const Eigen::Index F = kernel_.rows();
  Matrix all_patches(B * P, kernel_.cols());
  Matrix all_pre(B * P, F);
  Matrix pooled(B, F);
  for (Eigen::Index b = 0; b < B; ++b) {
    Matrix patches = im2col(inputs, b);
    Matrix pre = patches * kernel_.transpose();
    pre.rowwise() += kernel_bias_.row(0);
    pooled.row(b) = pre.cwiseMax(0.0).colwise().mean();
    if (tape != nullptr) {
      all_patches.middleRows(b * P, P) = patches;
      all_pre.middleRows(b * P, P) = pre;
    }
  }
  Matrix out = pooled * w_out_.transpose();
  out.rowwise() += b_out_.row(0);
  if (tape != nullptr) tape->saved = {std::move(all_patches), std::move(all_pre), std::move(pooled)};
  return out;
}

void ConvEncoder::backward(const EncoderTape& tape, const Matrix& grad_out, std::vector<Matrix>& grads) const {
  const Matrix& patches = tape.saved.at(0);
  const Matrix& pre = tape.saved.at(1);
  const Matrix& pooled = tape.saved.at(2);
  const Eigen::Index B = grad_out.rows();
  const Eigen::Index P = static_cast<Eigen::Index>(input_.height) * input_.width;
  grads[2].noalias() += grad_out.transpose() * pooled;
  grads[3] += grad_out.colwise().sum();
  const Matrix grad_pooled = grad_out * w_out_;  // B x F
  for (Eigen::Index b = 0; b < B; ++b) {
    Matrix grad_pre = (pre.middleRows(b * P, P).array() > 0.0).cast<double>().matrix();
    grad_pre.array().rowwise() *= (grad_pooled.row(b) / static_cast<double>(P)).array();
    grads[0].noalias() += grad_pre.transpose() * patches.middleRows(b * P, P);
    grads[1] += grad_pre.colwise().sum();
  }
}

Json ConvEncoder::architecture() const {
  return Json{{"kind", "conv"},
              {"channels", input_.channels},
              {"height", input_.height},
              {"width", input_.width},
              {"filters", kernel_.rows()},
              {"output_dim", w_out_.rows()}};
}

std::unique_ptr<Encoder> make_encoder(const Json& architecture) {
  const std::string kind = architecture.at("kind").get<std::string>();
  if (kind == "mlp") {
    return std::make_unique<MlpEncoder>(architecture.at("input_dim").get<int>(),
                                        architecture.at("hidden_dim").get<int>(),
                                        architecture.at("output_dim").get<int>(), 0);
  }
  if (kind == "conv") {
    const InputShape shape = InputShape::image(architecture.at("channels").get<int>(),
                                               architecture.at("height").get<int>(),
                                               architecture.at("width").get<int>());
    return std::make_unique<ConvEncoder>(shape, architecture.at("filters").get<int>(),
                                         architecture.at("output_dim").get<int>(), 0);
  }
  throw InvalidArgument("unknown encoder kind '" + kind + "'");
}

}  // namespace swat::model
