#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace rdpp {

struct AdamConfig {
  double learning_rate = 4e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam state for one logits slab. Minimizes: callers doing ascent negate
/// their gradient. Each slab keeps its own step count, so a context's bias
/// correction reflects only the updates it actually received.
class AdamSlab {
 public:
  AdamSlab(Eigen::Index rows, Eigen::Index cols)
      : m_(Eigen::MatrixXd::Zero(rows, cols)), v_(Eigen::MatrixXd::Zero(rows, cols)) {}

  void apply(Eigen::MatrixXd& theta, const Eigen::MatrixXd& grad, const AdamConfig& cfg) {
    ++step_;
    m_ = cfg.beta1 * m_ + (1.0 - cfg.beta1) * grad;
    v_ = cfg.beta2 * v_ + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
    theta.array() -=
        cfg.learning_rate * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + cfg.epsilon);
  }

  std::int64_t steps() const { return step_; }

 private:
  Eigen::MatrixXd m_;
  Eigen::MatrixXd v_;
  std::int64_t step_ = 0;
};

}  // namespace rdpp
