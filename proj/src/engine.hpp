#pragma once

#include <memory>
#include <optional>

#include "critic.hpp"
#include "problem.hpp"
#include "truncation.hpp"

namespace hjbac {

/// Chunk-sized workspace for batched evaluation. One instance is reused by a
/// worker across chunks; matrices are resized lazily and keep their storage.
struct ChunkWork {
  RowMat X;         // rows x d
  RowMat Araw, A;   // rows x k (pre/post clamp)
  RowMat clamp_gate;  // rows x k, 1 when the raw output is strictly inside bounds

  // critic caches; S1c and S2c carry the outer weights folded in
  RowMat Tc, S0c, S1c, S2c;  // rows x N*
  VectorXd Z, Q;
  RowMat Gz, Hzd;       // rows x d
  VectorXd etav;
  RowMat etag, etahd;   // rows x d
  RowMat GradQ, HQd;    // rows x d

  // actor caches
  RowMat Ta, S0a, S1a;  // rows x N

  // generator outputs
  VectorXd Lval, Hval;  // rows
  RowMat dUH;           // rows x k

  // columns-path scratch
  RowMat Col;        // rows x d
  RowMat Gcol;       // rows x N*
  VectorXd quad_sum; // rows

  VectorXd vec_a, vec_b, vec_c;
  RowMat scratch_mn;  // rows x width scratch for delta accumulation

  std::vector<double> buf_a, buf_b, buf_c, buf_d;
};

/// Checked-out workspaces so concurrent chunks never share storage.
class WorkPool {
 public:
  std::unique_ptr<ChunkWork> acquire();
  void release(std::unique_ptr<ChunkWork> w);
  static WorkPool& instance();
};

/// Fills the critic caches (activations, Z, Q, gradQ and, when need_second,
/// the Hessian diagonal) for rows [begin, end) of points.
void critic_chunk_eval(const CriticNet& critic, const MatrixXd& inner_sq,
                       const RowMat& points, std::size_t begin, std::size_t end,
                       ChunkWork& w, bool need_second);

/// Fills actor caches and the clamped actions for the rows already in w.X.
void actor_chunk_eval(const ShallowNet& actor, const ProblemSpec& problem, ChunkWork& w);

/// Generator values over the chunk: L = b.gradQ + (1/2) PhiPhi' : HessQ
/// + c - gamma Q, using the diagonal fast path or the per-column
/// directional form. Requires critic caches with need_second.
void generator_chunk(const ProblemSpec& problem, const CriticNet& critic, ChunkWork& w);

/// d/da of the Hamiltonian per point: analytic override when the problem has
/// one, else central differences in each action coordinate with the critic
/// point data held fixed.
void du_hamiltonian_chunk(const ProblemSpec& problem, const CriticNet& critic, ChunkWork& w,
                          double fd_step);

/// delta += sum_j weights(j) * grad_phi Z(x_j) over the chunk.
void z_delta_accumulate(const ShallowNet& z, ChunkWork& w, const VectorXd& weights,
                        VectorXd& delta);

/// delta += sum_j sum_l Psi(j,l) * grad_theta U_l(x_j) over the chunk.
void actor_delta_accumulate(const ShallowNet& actor, ChunkWork& w, const RowMat& Psi,
                            VectorXd& delta);

inline constexpr std::size_t kChunkRows = 256;

}  // namespace hjbac
