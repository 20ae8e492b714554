#pragma once

#include <memory>

#include "domain.hpp"
#include "fields.hpp"
#include "net.hpp"

namespace hjbac {

/// Value-function estimator Q(x) = Z(x) * eta(x) + gbar(x). The eta factor
/// vanishes on the boundary, so Q matches the boundary data there exactly
/// for any parameters of the inner network Z.
struct CriticNet {
  ShallowNet z;  // output_dim == 1
  DomainSpec domain;
  std::shared_ptr<const ScalarField> gbar;

  double value(std::span<const double> x) const;
};

CriticNet make_critic(ShallowNet z, const DomainSpec& domain,
                      std::shared_ptr<const ScalarField> gbar);

/// Cached single-point evaluation of Q with analytic first and second
/// derivatives assembled from Z, eta and gbar by the product rule.
struct CriticPointEval {
  double value = 0.0;
  VectorXd grad;
  /// a' HessQ(x) a + 2 s . gradQ(x); with a = column/sqrt(2), s = b/(2 d')
  /// this is one column's term of the generator shortcut.
  double dir2(std::span<const double> a, std::span<const double> s) const;
  double hess_quad(std::span<const double> a) const;
  void hess_diag(std::span<double> out) const;
  void hessian(std::span<double> out_dxd) const;

  // point-local pieces
  NetPointEval z_eval;
  double eta = 0.0;
  VectorXd eta_grad;
  const DomainSpec* domain = nullptr;
  const ScalarField* gbar = nullptr;
  std::vector<double> x_copy;
};

CriticPointEval critic_point_eval(const CriticNet& critic, std::span<const double> x);

}  // namespace hjbac
