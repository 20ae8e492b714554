#pragma once

#include <vector>

#include "limit_ode.hpp"
#include "net.hpp"
#include "problem.hpp"
#include "trainer.hpp"

namespace hjbac {

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// --- empirical-NTK variance decay -----------------------------------------

struct NtkVarianceRow {
  int width = 0;
  double variance = 0.0;  // over re-initializations, at a fixed (x, y)
};

struct NtkVarianceStudy {
  std::vector<NtkVarianceRow> rows;
  double slope = 0.0;  // expected near -1
};

NtkVarianceStudy ntk_variance_study(const std::vector<int>& widths, int reinits, int dim,
                                    double beta, std::uint64_t seed);

// --- initialization error scaling ------------------------------------------

struct InitErrorRow {
  int width = 0;
  double error = 0.0;  // sqrt of mean over seeds of |U0|^2 + |Q0 - gbar|^2 in L2(mu)
};

struct InitErrorStudy {
  std::vector<InitErrorRow> rows;
  double slope = 0.0;  // expected near 1/2 - beta
};

InitErrorStudy init_error_study(const ProblemSpec& problem, const std::vector<int>& widths,
                                int seeds, int sample_points, double beta, std::uint64_t seed);

// --- analyzed-regime training (SGD + smooth clipping + rate factors) -------

/// One alternating critic/actor iteration advances training time by dt:
///   phi   -= dt * omega * N^(2 beta - 1) * G_q
///   theta -= dt * alpha * N^(2 beta - 1) * G_u
/// with loss integrals evaluated on fixed quadrature nodes, matching the
/// exact-gradient dynamics the limit theory analyzes.
struct AnalyzedRun {
  ShallowNet actor, critic_z;
  ShallowNet actor0, critic0;
};

AnalyzedRun analyzed_regime_run(const ProblemSpec& problem, int width, double beta,
                                const RowMat& quadrature_nodes, int iterations, double dt,
                                double alpha, double omega, std::uint64_t seed);

// --- parameter drift bounds -------------------------------------------------

struct DriftRow {
  int width = 0;
  // max |p_t - p_0| per class, averaged over seeds
  double actor_outer = 0.0, actor_inner = 0.0, actor_bias = 0.0;
  double critic_outer = 0.0, critic_inner = 0.0, critic_bias = 0.0;
};

struct DriftStudy {
  std::vector<DriftRow> rows;
  double max_slope = 0.0;  // max over classes; expected <= delta + beta - 1
};

DriftStudy param_drift_study(const ProblemSpec& problem, const std::vector<int>& widths,
                             int seeds, int iterations, double dt, double beta,
                             int quad_points, std::uint64_t seed);

// --- width consistency against the limit flow ------------------------------

struct WidthConsistencyRow {
  int width = 0;
  double dist_t0 = 0.0;    // L2(mu) distance of (Q, U) at t = 0
  double dist_tend = 0.0;  // at the final time
  double dist_q_h2 = 0.0;  // finite-difference H2-style proxy for Q at t_end
};

struct WidthConsistencyStudy {
  std::vector<WidthConsistencyRow> rows;
  double t_end = 0.0;
  double init_slope = 0.0;  // slope of dist_t0, expected near 1/2 - beta
};

WidthConsistencyStudy width_consistency_study(const ProblemSpec& problem,
                                              const std::vector<int>& widths, int seeds,
                                              double t_end, double dt_train, double beta,
                                              const LimitOdeConfig& ode_cfg,
                                              std::uint64_t seed);

}  // namespace hjbac
