#pragma once

#include <string>
#include <vector>

#include "kernels.hpp"
#include "problem.hpp"

namespace hjbac {

struct LimitOdeConfig {
  int grid_n = 101;          // nodes per dimension (including boundary)
  long kernel_samples = 200000;
  double dt = 1e-3;
  double t_end = 50.0;
  double alpha = 1.0;        // actor rate
  double omega = 1.0;        // critic rate
  std::uint64_t seed = 0;
  int record_every = 1000;   // trace stride in steps
  double explosion_guard = 1e6;
  std::string kernel_cache_dir;  // empty disables the kernel disk cache

  void validate() const;
};

/// Grid state of the infinite-width flow: node values of (Q, U) with the
/// probability quadrature weights of mu over the grid.
struct LimitOdeState {
  RowMat nodes;       // nG x d
  VectorXd mu_w;      // quadrature weights, sum 1
  VectorXd q, u;      // node values
  double t = 0.0;
};

struct LimitOdeTracePoint {
  double t = 0.0;
  double residual_critic = 0.0;  // L2(mu) norm of B L^U Q
  double residual_actor = 0.0;   // L2(mu) norm of A dH/da
  double dist_q = 0.0;           // L2(mu) distance of Q to analytic V (if any)
  double dist_u = 0.0;
};

struct LimitOdeResult {
  LimitOdeState state;
  std::vector<LimitOdeTracePoint> trace;
  double residual_critic = 0.0;
  double residual_actor = 0.0;
};

/// Builds the grid for a problem (interval in 1-d; tensor grid for 2-d box
/// domains) and the mu quadrature weights.
LimitOdeState limit_ode_initial_state(const ProblemSpec& problem, const LimitOdeConfig& cfg);

/// Explicit-Euler integration of the wide-network limit flow
///   dQ/dt = omega * B L^U Q,   dU/dt = -alpha * A dH/da,
/// from (Q0, U0) = (gbar, 0), with kernel matrices estimated once by shared-
/// sample Monte Carlo and spatial derivatives of Q by finite differences
/// (second-order central inside, one-sided at the ends). Throws NumericError
/// when values explode (step size too large).
LimitOdeResult limit_ode_integrate(const ProblemSpec& problem, const LimitOdeConfig& cfg);

/// Residual norms of a given grid state under the problem (same operators the
/// integrator uses); exposed for fixed-point checks.
LimitOdeTracePoint limit_ode_residuals(const ProblemSpec& problem, const KernelMatrices& km,
                                       const LimitOdeState& st);

/// Finite-difference first/second derivatives of grid values along each
/// dimension; out_d1/out_d2 are nG x d.
void grid_derivatives(const LimitOdeState& st, int per_dim, const VectorXd& values,
                      RowMat& out_d1, RowMat& out_d2);

}  // namespace hjbac
