#pragma once

#include <span>
#include <vector>

#include "swat/core/types.hpp"

namespace swat::training {

// Linear warmup over the first `warmup` steps, then cosine decay reaching 0
// at the last step (step total - 1). Steps are 0-based.
struct WarmupCosineSchedule {
  double peak = 0.0;
  int warmup = 0;
  int total = 1;

  double at(int step) const;
};

// Adam with decoupled weight decay, one instance per parameter group.
class AdamW {
 public:
  AdamW(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // params[i] -= lr * (wd * params[i] + m_hat / (sqrt(v_hat) + eps)).
  // A zero learning rate leaves the parameters bit-identical.
  void step(std::span<Matrix* const> params, std::span<const Matrix> grads, double lr, double weight_decay);

  int steps_taken() const { return t_; }

 private:
  double beta1_;
  double beta2_;
  double eps_;
  int t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace swat::training
