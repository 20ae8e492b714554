#include "studies.hpp"

#include <cmath>
#include <limits>

#include "kernels.hpp"
#include "steps.hpp"

namespace hjbac {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw ConfigError("slope fit needs matching samples >= 2");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

NtkVarianceStudy ntk_variance_study(const std::vector<int>& widths, int reinits, int dim,
                                    double beta, std::uint64_t seed) {
  if (reinits < 2) throw ConfigError("variance study needs reinits >= 2");
  // fixed probe pair inside the unit ball
  RngStream rng(derive_seed(seed, 101));
  std::vector<double> x(dim), y(dim);
  for (int i = 0; i < dim; ++i) {
    x[i] = 0.4 * rng.uniform(-1.0, 1.0);
    y[i] = 0.4 * rng.uniform(-1.0, 1.0);
  }
  NtkVarianceStudy out;
  std::vector<double> ws, vs;
  for (const int N : widths) {
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < reinits; ++r) {
      const ShallowNet net =
          ShallowNet::init(N, dim, 1, beta, {.seed = derive_seed(seed, 102, N, r)});
      const double a = empirical_ntk(net, x, y);
      sum += a;
      sum_sq += a * a;
    }
    const double var = (sum_sq - sum * sum / reinits) / (reinits - 1);
    out.rows.push_back({N, var});
    ws.push_back(N);
    vs.push_back(std::max(var, 1e-300));
  }
  out.slope = loglog_slope(ws, vs);
  return out;
}

InitErrorStudy init_error_study(const ProblemSpec& problem, const std::vector<int>& widths,
                                int seeds, int sample_points, double beta,
                                std::uint64_t seed) {
  if (seeds < 1) throw ConfigError("init error study needs seeds >= 1");
  const int d = problem.domain.dim;
  RngStream point_rng(derive_seed(seed, 111));
  const RowMat pts = sample_interior(problem.domain, sample_points, point_rng);

  InitErrorStudy out;
  std::vector<double> ws, es;
  std::vector<double> u(problem.action_dim);
  for (const int N : widths) {
    double mean_sq = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const ShallowNet actor = ShallowNet::init(N, d, problem.action_dim, beta,
                                                {.seed = derive_seed(seed, 112, N, s)});
      const ShallowNet z =
          ShallowNet::init(N, d, 1, beta, {.seed = derive_seed(seed, 113, N, s)});
      const CriticNet critic = make_critic(z, problem.domain, problem.gbar);
      double acc = 0.0;
      for (Eigen::Index r = 0; r < pts.rows(); ++r) {
        const std::span<const double> x{pts.data() + r * d, static_cast<std::size_t>(d)};
        actor.forward(x, u);
        double usq = 0.0;
        for (double v : u) usq += v * v;
        const double qe = critic.value(x) - problem.gbar->value(x);
        acc += usq + qe * qe;
      }
      mean_sq += acc / static_cast<double>(pts.rows());
    }
    mean_sq /= seeds;
    out.rows.push_back({N, std::sqrt(mean_sq)});
    ws.push_back(N);
    es.push_back(std::max(std::sqrt(mean_sq), 1e-300));
  }
  out.slope = loglog_slope(ws, es);
  return out;
}

AnalyzedRun analyzed_regime_run(const ProblemSpec& problem, int width, double beta,
                                const RowMat& quadrature_nodes, int iterations, double dt,
                                double alpha, double omega, std::uint64_t seed) {
  AnalyzedRun run;
  run.actor = ShallowNet::init(width, problem.domain.dim, problem.action_dim, beta,
                               {.seed = derive_seed(seed, 121)});
  run.critic_z =
      ShallowNet::init(width, problem.domain.dim, 1, beta, {.seed = derive_seed(seed, 122)});
  run.actor0 = run.actor;
  run.critic0 = run.critic_z;

  const TruncationFamily fam(width, beta);
  const double rate = std::pow(static_cast<double>(width), 2.0 * beta - 1.0);
  for (int it = 0; it < iterations; ++it) {
    CriticNet critic = make_critic(run.critic_z, problem.domain, problem.gbar);
    const VectorXd gq =
        critic_gradient_batch(problem, critic, run.actor, fam, quadrature_nodes);
    run.critic_z.params().noalias() -= dt * omega * rate * gq;
    critic = make_critic(run.critic_z, problem.domain, problem.gbar);
    const VectorXd gu = actor_gradient_batch(problem, critic, run.actor, fam,
                                             quadrature_nodes, std::nullopt);
    run.actor.params().noalias() -= dt * alpha * rate * gu;
  }
  return run;
}

namespace {

double block_max_abs_diff(const VectorXd& a, const VectorXd& b, Eigen::Index begin,
                          Eigen::Index len) {
  return (a.segment(begin, len) - b.segment(begin, len)).cwiseAbs().maxCoeff();
}

RowMat study_quadrature(const ProblemSpec& problem, int quad_points, std::uint64_t seed) {
  RngStream rng(seed);
  return sample_interior(problem.domain, quad_points, rng);
}

}  // namespace

DriftStudy param_drift_study(const ProblemSpec& problem, const std::vector<int>& widths,
                             int seeds, int iterations, double dt, double beta,
                             int quad_points, std::uint64_t seed) {
  const RowMat quad = study_quadrature(problem, quad_points, derive_seed(seed, 131));
  DriftStudy out;
  std::vector<double> ws;
  std::vector<double> cls[6];
  for (const int N : widths) {
    DriftRow row;
    row.width = N;
    for (int s = 0; s < seeds; ++s) {
      const AnalyzedRun run = analyzed_regime_run(problem, N, beta, quad, iterations, dt, 1.0,
                                                  1.0, derive_seed(seed, 132, N, s));
      const int k = problem.action_dim;
      const int d = problem.domain.dim;
      const Eigen::Index kn = static_cast<Eigen::Index>(k) * N;
      const Eigen::Index nd = static_cast<Eigen::Index>(N) * d;
      row.actor_outer += block_max_abs_diff(run.actor.params(), run.actor0.params(), 0, kn);
      row.actor_inner +=
          block_max_abs_diff(run.actor.params(), run.actor0.params(), kn, nd);
      row.actor_bias +=
          block_max_abs_diff(run.actor.params(), run.actor0.params(), kn + nd, N);
      row.critic_outer +=
          block_max_abs_diff(run.critic_z.params(), run.critic0.params(), 0, N);
      row.critic_inner +=
          block_max_abs_diff(run.critic_z.params(), run.critic0.params(), N, nd);
      row.critic_bias +=
          block_max_abs_diff(run.critic_z.params(), run.critic0.params(), N + nd, N);
    }
    row.actor_outer /= seeds;
    row.actor_inner /= seeds;
    row.actor_bias /= seeds;
    row.critic_outer /= seeds;
    row.critic_inner /= seeds;
    row.critic_bias /= seeds;
    out.rows.push_back(row);
    ws.push_back(N);
    cls[0].push_back(row.actor_outer);
    cls[1].push_back(row.actor_inner);
    cls[2].push_back(row.actor_bias);
    cls[3].push_back(row.critic_outer);
    cls[4].push_back(row.critic_inner);
    cls[5].push_back(row.critic_bias);
  }
  out.max_slope = std::numeric_limits<double>::quiet_NaN();
  if (ws.size() >= 2) {
    out.max_slope = -std::numeric_limits<double>::infinity();
    for (auto& v : cls) {
      for (auto& e : v) e = std::max(e, 1e-300);
      out.max_slope = std::max(out.max_slope, loglog_slope(ws, v));
    }
  }
  return out;
}

WidthConsistencyStudy width_consistency_study(const ProblemSpec& problem,
                                              const std::vector<int>& widths, int seeds,
                                              double t_end, double dt_train, double beta,
                                              const LimitOdeConfig& ode_cfg,
                                              std::uint64_t seed) {
  if (problem.domain.dim != 1) {
    throw ConfigError("width consistency study is implemented for 1-d problems");
  }
  LimitOdeConfig ode = ode_cfg;
  ode.t_end = t_end;
  const LimitOdeResult limit = limit_ode_integrate(problem, ode);
  const RowMat& nodes = limit.state.nodes;
  const VectorXd& mu_w = limit.state.mu_w;

  // limit trajectory at t = 0 is (gbar, 0)
  LimitOdeState state0 = limit_ode_initial_state(problem, ode);

  const int iters = static_cast<int>(std::llround(t_end / dt_train));
  WidthConsistencyStudy out;
  out.t_end = t_end;
  std::vector<double> ws, d0s;

  const auto pair_distance = [&](const ShallowNet& actor, const ShallowNet& z,
                                 const LimitOdeState& ref, double* h2_proxy) {
    const CriticNet critic = make_critic(z, problem.domain, problem.gbar);
    const Eigen::Index nG = nodes.rows();
    VectorXd qn(nG), un(nG);
    double u = 0.0;
    for (Eigen::Index g = 0; g < nG; ++g) {
      const std::span<const double> x{nodes.data() + g, 1};
      qn(g) = critic.value(x);
      actor.forward(x, {&u, 1});
      un(g) = u;
    }
    const VectorXd dq = qn - ref.q;
    const VectorXd du = un - ref.u;
    double dist = std::sqrt((mu_w.array() * (dq.array().square() + du.array().square())).sum());
    if (h2_proxy) {
      RowMat d1a, d2a, d1b, d2b;
      grid_derivatives(ref, static_cast<int>(nG), qn, d1a, d2a);
      grid_derivatives(ref, static_cast<int>(nG), ref.q, d1b, d2b);
      double acc = (mu_w.array() * dq.array().square()).sum();
      acc += (mu_w.array() * (d1a - d1b).col(0).array().square()).sum();
      acc += (mu_w.array() * (d2a - d2b).col(0).array().square()).sum();
      *h2_proxy = std::sqrt(acc);
    }
    return dist;
  };

  for (const int N : widths) {
    WidthConsistencyRow row;
    row.width = N;
    for (int s = 0; s < seeds; ++s) {
      const std::uint64_t run_seed = derive_seed(seed, 141, N, s);
      // distance at t = 0 (pure initialization noise)
      {
        const ShallowNet actor = ShallowNet::init(N, 1, 1, beta,
                                                  {.seed = derive_seed(run_seed, 121)});
        const ShallowNet z =
            ShallowNet::init(N, 1, 1, beta, {.seed = derive_seed(run_seed, 122)});
        row.dist_t0 += pair_distance(actor, z, state0, nullptr);
      }
      const AnalyzedRun run =
          analyzed_regime_run(problem, N, beta, nodes, iters, dt_train, 1.0, 1.0, run_seed);
      double h2 = 0.0;
      row.dist_tend += pair_distance(run.actor, run.critic_z, limit.state, &h2);
      row.dist_q_h2 += h2;
    }
    row.dist_t0 /= seeds;
    row.dist_tend /= seeds;
    row.dist_q_h2 /= seeds;
    out.rows.push_back(row);
    ws.push_back(N);
    d0s.push_back(std::max(row.dist_t0, 1e-300));
  }
  out.init_slope = loglog_slope(ws, d0s);
  return out;
}

}  // namespace hjbac
