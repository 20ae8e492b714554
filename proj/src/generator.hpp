#pragma once

#include "critic.hpp"
#include "problem.hpp"

namespace hjbac {

/// L^u Q(x), the Hamiltonian H(u,Q)(x) = L^u Q(x) + gamma Q(x), and its
/// derivative in the action.
struct GeneratorEval {
  double value = 0.0;
  double hamiltonian = 0.0;
  VectorXd du_hamiltonian;
};

/// Pointwise critic access used by the reference generator path; backed by
/// either the network critic or an analytic field standing in for it.
class CriticSource {
 public:
  virtual ~CriticSource() = default;
  /// Re-centers the cached evaluation at x.
  virtual void move_to(std::span<const double> x) = 0;
  virtual double value() const = 0;
  virtual const VectorXd& grad() const = 0;
  virtual double hess_quad(std::span<const double> a) const = 0;
  virtual void hess_diag(std::span<double> out) const = 0;
};

class NetCriticSource final : public CriticSource {
 public:
  explicit NetCriticSource(const CriticNet& critic) : critic_(&critic) {}
  void move_to(std::span<const double> x) override { ev_ = critic_point_eval(*critic_, x); }
  double value() const override { return ev_.value; }
  const VectorXd& grad() const override { return ev_.grad; }
  double hess_quad(std::span<const double> a) const override { return ev_.hess_quad(a); }
  void hess_diag(std::span<double> out) const override { ev_.hess_diag(out); }

 private:
  const CriticNet* critic_;
  CriticPointEval ev_;
};

class FieldCriticSource final : public CriticSource {
 public:
  explicit FieldCriticSource(const ScalarField& f) : field_(&f) {}
  void move_to(std::span<const double> x) override {
    x_.assign(x.begin(), x.end());
    value_ = field_->value(x);
    grad_.resize(field_->dim());
    field_->gradient(x, {grad_.data(), static_cast<std::size_t>(field_->dim())});
  }
  double value() const override { return value_; }
  const VectorXd& grad() const override { return grad_; }
  double hess_quad(std::span<const double> a) const override {
    return field_->hessian_quad({x_.data(), x_.size()}, a);
  }
  void hess_diag(std::span<double> out) const override {
    field_->hessian_diag({x_.data(), x_.size()}, out);
  }

 private:
  const ScalarField* field_;
  std::vector<double> x_;
  double value_ = 0.0;
  VectorXd grad_;
};

/// Generator evaluation by the directional-second-derivative shortcut:
/// L = sum over the d' diffusion columns of dir2(col/sqrt(2), b/(2 d'))
///     + c(x, a) - gamma Q(x).
/// The source must already be centered at x. Set want_du_hamiltonian to also
/// fill d/da H, via the problem's analytic override when present, otherwise
/// central finite differences of step fd_step in each action coordinate
/// (critic terms held fixed, only coefficients vary).
GeneratorEval generator(const ProblemSpec& problem, CriticSource& q,
                        std::span<const double> x, std::span<const double> a,
                        bool want_du_hamiltonian = false, double fd_step = 1e-5);

}  // namespace hjbac
