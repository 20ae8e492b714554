#include "limit_ode.hpp"

#include <cmath>

namespace hjbac {

void LimitOdeConfig::validate() const {
  if (grid_n < 5) throw ConfigError("limit ode grid needs at least 5 nodes per dimension");
  if (kernel_samples < 1) throw ConfigError("kernel_samples must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (t_end < 0.0) throw ConfigError("t_end must be >= 0");
}

namespace {

void check_supported(const ProblemSpec& problem) {
  const int d = problem.domain.dim;
  if (d > 2) throw ConfigError("limit ode integration supports d <= 2 only");
  if (d == 2 && problem.domain.kind != DomainKind::box) {
    throw ConfigError("2-d limit ode integration needs a box domain (tensor grid)");
  }
  if (problem.diffusion_form != DiffusionForm::diagonal) {
    throw ConfigError("limit ode integration supports diagonal diffusion only");
  }
}

}  // namespace

LimitOdeState limit_ode_initial_state(const ProblemSpec& problem, const LimitOdeConfig& cfg) {
  cfg.validate();
  check_supported(problem);
  const int d = problem.domain.dim;
  const int n = cfg.grid_n;
  const double R = problem.domain.radius;
  LimitOdeState st;
  // Uniform node weights: the same discrete measure is reused as the
  // quadrature for analyzed-regime training runs, so the two flows see
  // exactly the same mu.
  if (d == 1) {
    st.nodes.resize(n, 1);
    const double h = 2.0 * R / (n - 1);
    for (int i = 0; i < n; ++i) st.nodes(i, 0) = -R + h * i;
  } else {
    st.nodes.resize(static_cast<Eigen::Index>(n) * n, 2);
    const double h = 2.0 * R / (n - 1);
    Eigen::Index g = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j, ++g) {
        st.nodes(g, 0) = -R + h * i;
        st.nodes(g, 1) = -R + h * j;
      }
    }
  }
  st.mu_w = VectorXd::Constant(st.nodes.rows(), 1.0 / static_cast<double>(st.nodes.rows()));
  const Eigen::Index nG = st.nodes.rows();
  st.q.resize(nG);
  st.u = VectorXd::Zero(nG);
  for (Eigen::Index g = 0; g < nG; ++g) {
    st.q(g) = problem.gbar->value({st.nodes.data() + g * d, static_cast<std::size_t>(d)});
  }
  st.t = 0.0;
  return st;
}

void grid_derivatives(const LimitOdeState& st, int per_dim, const VectorXd& values,
                      RowMat& out_d1, RowMat& out_d2) {
  const int d = static_cast<int>(st.nodes.cols());
  const Eigen::Index nG = st.nodes.rows();
  const int n = per_dim;
  const double hx = d == 1 ? st.nodes(1, 0) - st.nodes(0, 0) : st.nodes(n, 0) - st.nodes(0, 0);
  const double hy = d == 1 ? hx : st.nodes(1, 1) - st.nodes(0, 1);
  out_d1.resize(nG, d);
  out_d2.resize(nG, d);

  const auto stencil = [](const VectorXd& v, Eigen::Index base, Eigen::Index stride, int i,
                          int n_axis, double hh, double& d1, double& d2) {
    const auto at = [&](int j) { return v(base + stride * j); };
    if (i == 0) {
      d1 = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * hh);
      d2 = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (hh * hh);
    } else if (i == n_axis - 1) {
      d1 = (3.0 * at(i) - 4.0 * at(i - 1) + at(i - 2)) / (2.0 * hh);
      d2 = (2.0 * at(i) - 5.0 * at(i - 1) + 4.0 * at(i - 2) - at(i - 3)) / (hh * hh);
    } else {
      d1 = (at(i + 1) - at(i - 1)) / (2.0 * hh);
      d2 = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (hh * hh);
    }
  };

  if (d == 1) {
    for (int i = 0; i < n; ++i) {
      stencil(values, 0, 1, i, n, hx, out_d1(i, 0), out_d2(i, 0));
    }
    return;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Index g = static_cast<Eigen::Index>(i) * n + j;
      // along x: stride n with row base j
      stencil(values, j, n, i, n, hx, out_d1(g, 0), out_d2(g, 0));
      // along y: stride 1 with base row i*n
      stencil(values, static_cast<Eigen::Index>(i) * n, 1, j, n, hy, out_d1(g, 1),
              out_d2(g, 1));
    }
  }
}

namespace {

// L^U Q and dH/da at every node from grid values.
void node_operators(const ProblemSpec& problem, const LimitOdeState& st, int per_dim,
                    VectorXd& Lvals, VectorXd& dh) {
  const int d = problem.domain.dim;
  const Eigen::Index nG = st.nodes.rows();
  thread_local RowMat d1, d2;
  grid_derivatives(st, per_dim, st.q, d1, d2);
  Lvals.resize(nG);
  dh.resize(nG);
  thread_local std::vector<double> b, phi, hd, duh;
  b.resize(d);
  phi.resize(d);
  hd.resize(d);
  duh.resize(1);
  for (Eigen::Index g = 0; g < nG; ++g) {
    const std::span<const double> x{st.nodes.data() + g * d, static_cast<std::size_t>(d)};
    const double a_val = st.u(g);
    const std::span<const double> a{&a_val, 1};
    problem.drift(x, a, b);
    problem.diffusion_diag(x, a, phi);
    double L = problem.running_cost(x, a) - problem.gamma * st.q(g);
    for (int i = 0; i < d; ++i) {
      L += b[i] * d1(g, i) + 0.5 * phi[i] * phi[i] * d2(g, i);
      hd[i] = d2(g, i);
    }
    Lvals(g) = L;
    if (problem.du_hamiltonian_override) {
      const CriticLocal local{st.q(g), {d1.data() + g * d, static_cast<std::size_t>(d)}, hd};
      problem.du_hamiltonian_override(x, a, local, duh);
      dh(g) = duh[0];
    } else {
      // central difference in the scalar action
      const double step = 1e-5;
      double hs[2];
      for (int side = 0; side < 2; ++side) {
        const double av = a_val + (side == 0 ? step : -step);
        const std::span<const double> ap{&av, 1};
        problem.drift(x, ap, b);
        problem.diffusion_diag(x, ap, phi);
        double h = problem.running_cost(x, ap);
        for (int i = 0; i < d; ++i) h += b[i] * d1(g, i) + 0.5 * phi[i] * phi[i] * d2(g, i);
        hs[side] = h;
      }
      dh(g) = (hs[0] - hs[1]) / (2.0 * step);
    }
  }
}

double weighted_l2(const VectorXd& v, const VectorXd& w) {
  return std::sqrt((w.array() * v.array().square()).sum());
}

}  // namespace

LimitOdeTracePoint limit_ode_residuals(const ProblemSpec& problem, const KernelMatrices& km,
                                       const LimitOdeState& st) {
  const int per_dim = problem.domain.dim == 1 ? static_cast<int>(st.nodes.rows())
                                              : static_cast<int>(std::lround(
                                                    std::sqrt(st.nodes.rows())));
  VectorXd Lvals, dh;
  node_operators(problem, st, per_dim, Lvals, dh);
  LimitOdeTracePoint tp;
  tp.t = st.t;
  const VectorXd bq = km.B * (st.mu_w.cwiseProduct(Lvals));
  const VectorXd au = km.A * (st.mu_w.cwiseProduct(dh));
  tp.residual_critic = weighted_l2(bq, st.mu_w);
  tp.residual_actor = weighted_l2(au, st.mu_w);
  if (problem.has_analytic()) {
    const Eigen::Index nG = st.nodes.rows();
    const int d = problem.domain.dim;
    VectorXd dq(nG), du(nG);
    double uval = 0.0;
    for (Eigen::Index g = 0; g < nG; ++g) {
      const std::span<const double> x{st.nodes.data() + g * d, static_cast<std::size_t>(d)};
      dq(g) = st.q(g) - problem.value_field->value(x);
      problem.optimal_control(x, {&uval, 1});
      du(g) = st.u(g) - uval;
    }
    tp.dist_q = weighted_l2(dq, st.mu_w);
    tp.dist_u = weighted_l2(du, st.mu_w);
  }
  return tp;
}

LimitOdeResult limit_ode_integrate(const ProblemSpec& problem, const LimitOdeConfig& cfg) {
  cfg.validate();
  check_supported(problem);
  if (problem.action_dim != 1) {
    throw ConfigError("limit ode integration supports scalar actions only");
  }
  LimitOdeResult res;
  res.state = limit_ode_initial_state(problem, cfg);
  auto& st = res.state;
  const KernelMatrices km = kernel_matrices_cached(problem.domain, st.nodes,
                                                   cfg.kernel_samples, cfg.seed,
                                                   cfg.kernel_cache_dir);
  const int per_dim = cfg.grid_n;

  const long steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  VectorXd Lvals, dh;
  res.trace.push_back(limit_ode_residuals(problem, km, st));
  for (long s = 0; s < steps; ++s) {
    node_operators(problem, st, per_dim, Lvals, dh);
    st.q.noalias() += cfg.dt * cfg.omega * (km.B * st.mu_w.cwiseProduct(Lvals));
    st.u.noalias() -= cfg.dt * cfg.alpha * (km.A * st.mu_w.cwiseProduct(dh));
    st.t += cfg.dt;
    if (st.q.cwiseAbs().maxCoeff() > cfg.explosion_guard ||
        st.u.cwiseAbs().maxCoeff() > cfg.explosion_guard || !st.q.allFinite() ||
        !st.u.allFinite()) {
      throw NumericError("limit ode exploded; reduce the time step");
    }
    if ((s + 1) % cfg.record_every == 0 || s + 1 == steps) {
      res.trace.push_back(limit_ode_residuals(problem, km, st));
    }
  }
  const auto& last = res.trace.back();
  res.residual_critic = last.residual_critic;
  res.residual_actor = last.residual_actor;
  return res;
}

}  // namespace hjbac
