#pragma once

#include <optional>

#include "engine.hpp"

namespace hjbac {

/// Monte Carlo clipped Q-PDE gradient over a batch (one x per row):
///   G_q = (1/m) sum_j F(L Q(x_j)) * grad_phi(-Q(x_j)),
/// returned flat in the z-network layout. mean_sq_residual receives the
/// batch mean of (L Q)^2. Chunk-parallel with ordered reduction.
VectorXd critic_gradient_batch(const ProblemSpec& problem, const CriticNet& critic,
                               const ShallowNet& actor, const TruncationFamily& fam,
                               const RowMat& batch, double* mean_sq_residual = nullptr);

/// Monte Carlo clipped actor gradient over a batch:
///   G_u = (1/m) sum_j psi(dH/da(x_j)) . grad_theta U(x_j),
/// with per-coordinate clamp gating and, when loss_floor is set, zero
/// contribution from points where H - gamma Q <= loss_floor.
/// mean_hamiltonian receives the batch mean of H.
VectorXd actor_gradient_batch(const ProblemSpec& problem, const CriticNet& critic,
                              const ShallowNet& actor, const TruncationFamily& fam,
                              const RowMat& batch, std::optional<double> loss_floor,
                              double* mean_hamiltonian = nullptr, double fd_step = 1e-5);

/// Accumulated squared errors of the pair against the analytic solution.
struct EvalSums {
  double critic_sq = 0.0;   // sum (Q - V)^2
  double value_sq = 0.0;    // sum V^2
  double actor_sq = 0.0;    // sum |U - u*|^2
  double control_sq = 0.0;  // sum |u*|^2
  long count = 0;
};

EvalSums evaluate_batch(const ProblemSpec& problem, const CriticNet& critic,
                        const ShallowNet& actor, const RowMat& points);

}  // namespace hjbac
