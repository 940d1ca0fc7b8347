#include "swat/training/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swat/core/error.hpp"

namespace swat::training {

double WarmupCosineSchedule::at(int step) const {
  if (total <= 1) return peak;
  const int w = std::min(warmup, total - 1);
  if (step < w) return peak * static_cast<double>(step + 1) / static_cast<double>(w);
  const double progress = static_cast<double>(step - w + 1) / static_cast<double>(total - w);
  return peak * 0.5 * (1.0 + std::cos(std::numbers::pi * std::min(progress, 1.0)));
}

void AdamW::step(std::span<Matrix* const> params, std::span<const Matrix> grads, double lr, double weight_decay) {
  if (params.size() != grads.size()) throw InvalidArgument("AdamW: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) throw InvalidArgument("AdamW: parameter set changed between steps");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseProduct(grads[i]);
    if (lr == 0.0) continue;
    Matrix& p = *params[i];
    if (weight_decay != 0.0) p *= (1.0 - lr * weight_decay);
    p.array() -= lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace swat::training
