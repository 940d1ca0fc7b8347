#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/core/types.hpp"

namespace swat::model {

// Activations an encoder keeps from forward() for its backward pass.
struct EncoderTape {
  std::vector<Matrix> saved;
};

// Trainable visual encoder: a batch of flattened inputs (B x input size) to
// features (B x output_dim). Gradients are computed by hand; backward()
// accumulates into `grads`, which is laid out like parameters().
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::string kind() const = 0;
  virtual InputShape input_shape() const = 0;
  virtual int output_dim() const = 0;

  virtual Matrix forward(const Matrix& inputs, EncoderTape* tape = nullptr) const = 0;
  virtual void backward(const EncoderTape& tape, const Matrix& grad_out, std::vector<Matrix>& grads) const = 0;

  virtual std::vector<Matrix*> parameters() = 0;
  std::vector<const Matrix*> parameters() const;
  virtual std::vector<std::string> parameter_names() const = 0;

  virtual std::unique_ptr<Encoder> clone() const = 0;
  // Enough to rebuild an encoder with the same shapes (see make_encoder).
  virtual Json architecture() const = 0;

  std::vector<Matrix> zero_gradients() const;
  std::string parameter_hash() const;
};

// Two-layer perceptron: in -> hidden (ReLU) -> out.
class MlpEncoder final : public Encoder {
 public:
  MlpEncoder(int input_dim, int hidden_dim, int output_dim, std::uint64_t seed);

  std::string kind() const override { return "mlp"; }
  InputShape input_shape() const override { return InputShape::features(static_cast<int>(w1_.cols())); }
  int output_dim() const override { return static_cast<int>(w2_.rows()); }
  int hidden_dim() const { return static_cast<int>(w1_.rows()); }

  Matrix forward(const Matrix& inputs, EncoderTape* tape = nullptr) const override;
  void backward(const EncoderTape& tape, const Matrix& grad_out, std::vector<Matrix>& grads) const override;
  std::vector<Matrix*> parameters() override { return {&w1_, &b1_, &w2_, &b2_}; }
  std::vector<std::string> parameter_names() const override { return {"mlp.w1", "mlp.b1", "mlp.w2", "mlp.b2"}; }
  std::unique_ptr<Encoder> clone() const override { return std::make_unique<MlpEncoder>(*this); }
  Json architecture() const override;

 private:
  Matrix w1_;  // hidden x in
  Matrix b1_;  // 1 x hidden
  Matrix w2_;  // out x hidden
  Matrix b2_;  // 1 x out
};

// 3x3 convolution (same padding) -> ReLU -> global average pool -> linear.
class ConvEncoder final : public Encoder {
 public:
  ConvEncoder(InputShape input, int filters, int output_dim, std::uint64_t seed);

  std::string kind() const override { return "conv"; }
  InputShape input_shape() const override { return input_; }
  int output_dim() const override { return static_cast<int>(w_out_.rows()); }

  Matrix forward(const Matrix& inputs, EncoderTape* tape = nullptr) const override;
  void backward(const EncoderTape& tape, const Matrix& grad_out, std::vector<Matrix>& grads) const override;
  std::vector<Matrix*> parameters() override { return {&kernel_, &kernel_bias_, &w_out_, &b_out_}; }
  std::vector<std::string> parameter_names() const override {
    return {"conv.kernel", "conv.bias", "conv.w_out", "conv.b_out"};
  }
  std::unique_ptr<Encoder> clone() const override { return std::make_unique<ConvEncoder>(*this); }
  Json architecture() const override;

 private:
  Matrix im2col(const Matrix& inputs, Eigen::Index row) const;

  InputShape input_;
  Matrix kernel_;       // filters x (channels * 9)
  Matrix kernel_bias_;  // 1 x filters
  Matrix w_out_;        // out x filters
  Matrix b_out_;        // 1 x out
};

// Rebuilds an encoder from architecture(); parameters are freshly initialized.
std::unique_ptr<Encoder> make_encoder(const Json& architecture);

}  // namespace swat::model
