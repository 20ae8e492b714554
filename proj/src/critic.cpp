#include "critic.hpp"

namespace hjbac {

CriticNet make_critic(ShallowNet z, const DomainSpec& domain,
                      std::shared_ptr<const ScalarField> gbar) {
  if (z.output_dim() != 1) throw ConfigError("critic inner network must have one output");
  if (z.input_dim() != domain.dim) throw ConfigError("critic network dimension mismatch");
  if (!gbar || gbar->dim() != domain.dim) throw ConfigError("boundary interpolant mismatch");
  return CriticNet{std::move(z), domain, std::move(gbar)};
}

double CriticNet::value(std::span<const double> x) const {
  return z.forward1(x) * domain.eta(x) + gbar->value(x);
}

CriticPointEval critic_point_eval(const CriticNet& critic, std::span<const double> x) {
  const int d = critic.domain.dim;
  CriticPointEval ev;
  ev.domain = &critic.domain;
  ev.gbar = critic.gbar.get();
  ev.x_copy.assign(x.begin(), x.end());
  ev.z_eval = net_point_eval(critic.z, x);
  ev.eta = critic.domain.eta(x);
  ev.eta_grad.resize(d);
  critic.domain.eta_gradient(x, {ev.eta_grad.data(), static_cast<std::size_t>(d)});
  ev.grad.resize(d);
  critic.gbar->gradient(x, {ev.grad.data(), static_cast<std::size_t>(d)});
  ev.grad += ev.eta * ev.z_eval.grad + ev.z_eval.value * ev.eta_grad;
  ev.value = ev.z_eval.value * ev.eta + critic.gbar->value(x);
  return ev;
}

double CriticPointEval::hess_quad(std::span<const double> a) const {
  const std::span<const double> x{x_copy.data(), x_copy.size()};
  // Hess(Z*eta + gbar) = eta HessZ + gradZ gradEta' + gradEta gradZ'
  //                      + Z HessEta + HessGbar, contracted with a on both sides.
  const double za = z_eval.grad_dot(a);
  const double ea = eta_grad.dot(as_vec(a));
  return eta * z_eval.hess_quad(a) + 2.0 * za * ea +
         z_eval.value * domain->eta_hessian_quad(x, a) + gbar->hessian_quad(x, a);
}

double CriticPointEval::dir2(std::span<const double> a, std::span<const double> s) const {
  return hess_quad(a) + 2.0 * grad.dot(as_vec(s));
}

void CriticPointEval::hess_diag(std::span<double> out) const {
  const int d = domain->dim;
  const std::span<const double> x{x_copy.data(), x_copy.size()};
  thread_local std::vector<double> zdd, edd, gdd;
  zdd.resize(d);
  edd.resize(d);
  gdd.resize(d);
  z_eval.hess_diag(zdd);
  domain->eta_hessian_diag(x, edd);
  gbar->hessian_diag(x, gdd);
  for (int i = 0; i < d; ++i) {
    out[i] = eta * zdd[i] + 2.0 * z_eval.grad(i) * eta_grad(i) + z_eval.value * edd[i] + gdd[i];
  }
}

void CriticPointEval::hessian(std::span<double> out_dxd) const {
  const int d = domain->dim;
  const std::span<const double> x{x_copy.data(), x_copy.size()};
  std::vector<double> zh(static_cast<std::size_t>(d) * d), eh(zh.size()), gh(zh.size());
  z_eval.hessian(zh);
  domain->eta_hessian(x, eh);
  gbar->hessian(x, gh);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * d + j;
      out_dxd[idx] = eta * zh[idx] + z_eval.grad(i) * eta_grad(j) +
                     eta_grad(i) * z_eval.grad(j) + z_eval.value * eh[idx] + gh[idx];
    }
  }
}

}  // namespace hjbac
