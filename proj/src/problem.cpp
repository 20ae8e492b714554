#include "problem.hpp"

#include <algorithm>
#include <cmath>

namespace hjbac {

void ProblemSpec::clamp_action(std::span<double> a) const {
  if (!action_clamp) return;
  for (int l = 0; l < action_dim; ++l) {
    a[l] = std::clamp(a[l], action_clamp->lo(l), action_clamp->hi(l));
  }
}

void ProblemSpec::validate() const {
  domain.validate();
  if (action_dim < 1 || noise_dim < 1) throw ConfigError("action/noise dimensions must be >= 1");
  if (gamma < 0.0) throw ConfigError("discount rate must be >= 0");
  if (!drift || !running_cost || !gbar) throw ConfigError("problem is missing coefficients");
  if (diffusion_form == DiffusionForm::diagonal) {
    if (noise_dim != domain.dim) throw ConfigError("diagonal diffusion requires noise_dim == dim");
    if (!diffusion_diag) throw ConfigError("diagonal diffusion evaluator missing");
  }
  if (!diffusion_column) throw ConfigError("column diffusion evaluator missing");
  if (action_clamp &&
      (action_clamp->lo.size() != action_dim || action_clamp->hi.size() != action_dim)) {
    throw ConfigError("action clamp bounds mismatch action_dim");
  }
}

double ProblemSpec::zeta(std::span<const double> x, std::span<const double> a) const {
  if (!value_field) throw ConfigError("zeta requires an analytic value function");
  const int d = domain.dim;
  thread_local std::vector<double> b, gv, buf;
  b.resize(d);
  gv.resize(d);
  drift(x, a, b);
  value_field->gradient(x, gv);
  double h = running_cost(x, a) - gamma * value_field->value(x);
  for (int i = 0; i < d; ++i) h += b[i] * gv[i];
  if (diffusion_form == DiffusionForm::diagonal) {
    thread_local std::vector<double> phi, hd;
    phi.resize(d);
    hd.resize(d);
    diffusion_diag(x, a, phi);
    value_field->hessian_diag(x, hd);
    for (int i = 0; i < d; ++i) h += 0.5 * phi[i] * phi[i] * hd[i];
  } else {
    buf.resize(d);
    for (int j = 0; j < noise_dim; ++j) {
      diffusion_column(x, a, j, buf);
      h += 0.5 * value_field->hessian_quad(x, buf);
    }
  }
  return h;
}

namespace {

// Synthesizes column access from a diagonal evaluator.
ProblemSpec::DiffColFn column_from_diag(ProblemSpec::DiffDiagFn diag, int dim) {
  return [diag = std::move(diag), dim](std::span<const double> x, std::span<const double> a,
                                       int j, std::span<double> out) {
    thread_local std::vector<double> phi;
    phi.resize(dim);
    diag(x, a, phi);
    for (int i = 0; i < dim; ++i) out[i] = 0.0;
    out[j] = phi[j];
  };
}

}  // namespace

double lqr_gain(double p, double q, double xi, double gamma) {
  return (std::sqrt(q * q * gamma * gamma + 4.0 * p * q * xi * xi) - gamma * q) /
         (2.0 * xi * xi);
}

ProblemSpec make_lqr(int dim, double p, double q, double xi, double gamma, double R,
                     double eps) {
  if (!(p > 0.0 && q > 0.0 && xi > 0.0 && gamma > 0.0 && R > 0.0)) {
    throw ConfigError("lqr requires positive p, q, xi, gamma, R");
  }
  if (dim < 1) throw ConfigError("lqr dimension must be >= 1");
  const double k = lqr_gain(p, q, xi, gamma);

  ProblemSpec ps;
  ps.name = "lqr";
  ps.domain = {DomainKind::ball, dim, R};
  ps.action_dim = dim;
  ps.noise_dim = dim;
  ps.gamma = gamma;
  ps.diffusion_form = DiffusionForm::diagonal;

  ps.drift = [xi, dim](std::span<const double>, std::span<const double> a,
                       std::span<double> out) {
    for (int i = 0; i < dim; ++i) out[i] = xi * a[i];
  };
  ps.diffusion_diag = [eps, dim](std::span<const double> x, std::span<const double> a,
                                 std::span<double> out) {
    constexpr double sqrt2 = 1.4142135623730950488;
    for (int i = 0; i < dim; ++i) out[i] = sqrt2 * (1.0 + eps * x[i] * a[i]);
  };
  ps.diffusion_column = column_from_diag(ps.diffusion_diag, dim);
  ps.running_cost = [q, k, xi, eps, gamma, dim](std::span<const double> x,
                                                std::span<const double> a) {
    double c = -2.0 * k * dim;
    const double w = k * k * (xi + 2.0 * eps) * (xi + 2.0 * eps);
    for (int i = 0; i < dim; ++i) {
      c += q * a[i] * a[i] + gamma * k * x[i] * x[i] +
           w * x[i] * x[i] / (q + 2.0 * k * eps * eps * x[i] * x[i]);
    }
    return c;
  };
  ps.gbar = std::make_shared<ConstantField>(dim, k * R * R);
  ps.value_field = std::make_shared<CallbackField>(
      dim,
      [k, dim](std::span<const double> x) {
        double r2 = 0.0;
        for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
        return k * r2;
      },
      [k, dim](std::span<const double> x, std::span<double> out) {
        for (int i = 0; i < dim; ++i) out[i] = 2.0 * k * x[i];
      },
      [k, dim](std::span<const double>, std::span<double> out) {
        for (int i = 0; i < dim * dim; ++i) out[i] = 0.0;
        for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i) * dim + i] = 2.0 * k;
      });
  ps.optimal_control = [k, q, xi, eps, dim](std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < dim; ++i) {
      out[i] = -x[i] * k * (xi + 2.0 * eps) / (q + 2.0 * k * eps * eps * x[i] * x[i]);
    }
  };
  ps.du_hamiltonian_override = [k, q, xi, eps, dim](std::span<const double> x,
                                                    std::span<const double> a,
                                                    const CriticLocal& ql,
                                                    std::span<double> out) {
    for (int l = 0; l < dim; ++l) {
      out[l] = 2.0 * eps * x[l] * (1.0 + eps * x[l] * a[l]) * ql.hess_diag[l] +
               xi * ql.grad[l] + 2.0 * q * a[l];
    }
  };
  ps.validate();
  return ps;
}

ProblemSpec make_constructed(const ConstructedSpec& cs) {
  if (!cs.value_field || !cs.optimal_control || !cs.zeta || !cs.drift) {
    throw ConfigError("constructed problem needs V, u*, zeta and drift");
  }
  ProblemSpec ps;
  ps.name = cs.name;
  ps.domain = cs.domain;
  ps.action_dim = cs.action_dim;
  ps.noise_dim = cs.noise_dim;
  ps.gamma = cs.gamma;
  ps.diffusion_form = cs.diffusion_form;
  ps.drift = cs.drift;
  ps.diffusion_diag = cs.diffusion_diag;
  ps.diffusion_column = cs.diffusion_column;
  if (!ps.diffusion_column && ps.diffusion_form == DiffusionForm::diagonal) {
    ps.diffusion_column = column_from_diag(ps.diffusion_diag, ps.domain.dim);
  }
  ps.gbar = std::make_shared<ConstantField>(cs.domain.dim, cs.gbar_constant);
  ps.value_field = cs.value_field;
  ps.optimal_control = cs.optimal_control;
  ps.action_clamp = cs.action_clamp;
  ps.du_hamiltonian_override = cs.du_hamiltonian_override;

  // Running cost chosen so the equation is solved by (V, u*):
  //   c = zeta + gamma V - b . grad V - (1/2) Phi Phi' : Hess V.
  const auto vf = cs.value_field;
  const auto drift = cs.drift;
  const auto zeta = cs.zeta;
  const double gamma = cs.gamma;
  const int d = cs.domain.dim;
  const int dprime = cs.noise_dim;
  if (cs.diffusion_form == DiffusionForm::diagonal) {
    const auto diag = cs.diffusion_diag;
    ps.running_cost = [vf, drift, zeta, diag, gamma, d](std::span<const double> x,
                                                        std::span<const double> a) {
      thread_local std::vector<double> b, gv, phi, hd;
      b.resize(d);
      gv.resize(d);
      phi.resize(d);
      hd.resize(d);
      drift(x, a, b);
      vf->gradient(x, gv);
      diag(x, a, phi);
      vf->hessian_diag(x, hd);
      double c = zeta(x, a) + gamma * vf->value(x);
      for (int i = 0; i < d; ++i) c -= b[i] * gv[i] + 0.5 * phi[i] * phi[i] * hd[i];
      return c;
    };
  } else {
    const auto col = cs.diffusion_column;
    ps.running_cost = [vf, drift, zeta, col, gamma, d, dprime](std::span<const double> x,
                                                               std::span<const double> a) {
      thread_local std::vector<double> b, gv, cbuf;
      b.resize(d);
      gv.resize(d);
      cbuf.resize(d);
      drift(x, a, b);
      vf->gradient(x, gv);
      double c = zeta(x, a) + gamma * vf->value(x);
      for (int i = 0; i < d; ++i) c -= b[i] * gv[i];
      for (int j = 0; j < dprime; ++j) {
        col(x, a, j, cbuf);
        c -= 0.5 * vf->hessian_quad(x, cbuf);
      }
      return c;
    };
  }
  ps.validate();
  return ps;
}

}  // namespace hjbac
