#pragma once

#include "common.hpp"

namespace hjbac {

enum class OptimizerKind { sgd, adam };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Descent step p <- p - lr * step(G) for one parameter group.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, Eigen::Index n, AdamParams adam = {})
      : kind_(kind), adam_(adam) {
    if (kind == OptimizerKind::adam) {
      m_ = VectorXd::Zero(n);
      v_ = VectorXd::Zero(n);
    }
  }

  void step(VectorXd& params, const VectorXd& grad, double lr) {
    if (kind_ == OptimizerKind::sgd) {
      params.noalias() -= lr * grad;
      return;
    }
    ++t_;
    m_ = adam_.beta1 * m_ + (1.0 - adam_.beta1) * grad;
    v_ = (adam_.beta2 * v_.array() + (1.0 - adam_.beta2) * grad.array().square()).matrix();
    const double bc1 = 1.0 - std::pow(adam_.beta1, t_);
    const double bc2 = 1.0 - std::pow(adam_.beta2, t_);
    params.array() -=
        lr * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + adam_.eps);
  }

 private:
  OptimizerKind kind_;
  AdamParams adam_;
  VectorXd m_, v_;
  long t_ = 0;
};

}  // namespace hjbac
