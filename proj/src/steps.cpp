#include "steps.hpp"

#include <vector>

#include "parallel.hpp"

namespace hjbac {

namespace {

struct ChunkOut {
  VectorXd delta;
  double stat = 0.0;
  bool failed = false;
  std::string error;
};

}  // namespace

VectorXd critic_gradient_batch(const ProblemSpec& problem, const CriticNet& critic,
                               const ShallowNet& actor, const TruncationFamily& fam,
                               const RowMat& batch, double* mean_sq_residual) {
  const std::size_t m = static_cast<std::size_t>(batch.rows());
  const MatrixXd inner_sq = critic.z.inner().array().square().matrix();
  const std::size_t nchunks = chunk_count(m, kChunkRows);
  std::vector<ChunkOut> parts(nchunks);

  parallel_chunks(m, kChunkRows, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto w = WorkPool::instance().acquire();
    auto& part = parts[c];
    part.delta = VectorXd::Zero(critic.z.param_count());
    try {
      critic_chunk_eval(critic, inner_sq, batch, b, e, *w, /*need_second=*/true);
      actor_chunk_eval(actor, problem, *w);
      generator_chunk(problem, critic, *w);
      const Eigen::Index rows = w->X.rows();
      VectorXd weights(rows);
      double loss = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) {
        const double L = w->Lval(r);
        loss += L * L;
        // grad_phi(-Q) = -eta grad_phi Z
        weights(r) = -fam(L).F * w->etav(r) / static_cast<double>(m);
      }
      part.stat = loss;
      z_delta_accumulate(critic.z, *w, weights, part.delta);
    } catch (const std::exception& ex) {
      part.failed = true;
      part.error = ex.what();
    }
    WorkPool::instance().release(std::move(w));
  });

  VectorXd delta = VectorXd::Zero(critic.z.param_count());
  double loss = 0.0;
  for (auto& p : parts) {
    if (p.failed) throw NumericError(p.error);
    delta += p.delta;
    loss += p.stat;
  }
  if (mean_sq_residual) *mean_sq_residual = loss / static_cast<double>(m);
  return delta;
}

VectorXd actor_gradient_batch(const ProblemSpec& problem, const CriticNet& critic,
                              const ShallowNet& actor, const TruncationFamily& fam,
                              const RowMat& batch, std::optional<double> loss_floor,
                              double* mean_hamiltonian, double fd_step) {
  const std::size_t m = static_cast<std::size_t>(batch.rows());
  const int k = problem.action_dim;
  const MatrixXd inner_sq = critic.z.inner().array().square().matrix();
  const std::size_t nchunks = chunk_count(m, kChunkRows);
  std::vector<ChunkOut> parts(nchunks);

  parallel_chunks(m, kChunkRows, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto w = WorkPool::instance().acquire();
    auto& part = parts[c];
    part.delta = VectorXd::Zero(actor.param_count());
    try {
      critic_chunk_eval(critic, inner_sq, batch, b, e, *w, /*need_second=*/true);
      actor_chunk_eval(actor, problem, *w);
      generator_chunk(problem, critic, *w);
      du_hamiltonian_chunk(problem, critic, *w, fd_step);
      const Eigen::Index rows = w->X.rows();
      RowMat psi(rows, k);
      double ham = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) {
        ham += w->Hval(r);
        // the floored loss max(H - gamma Q, floor) has zero gradient at and
        // below the floor; H - gamma Q is exactly the generator value
        const double gate = (loss_floor && w->Lval(r) <= *loss_floor) ? 0.0 : 1.0;
        for (int l = 0; l < k; ++l) {
          psi(r, l) = fam(w->dUH(r, l)).psi * w->clamp_gate(r, l) * gate /
                      static_cast<double>(m);
        }
      }
      part.stat = ham;
      actor_delta_accumulate(actor, *w, psi, part.delta);
    } catch (const std::exception& ex) {
      part.failed = true;
      part.error = ex.what();
    }
    WorkPool::instance().release(std::move(w));
  });

  VectorXd delta = VectorXd::Zero(actor.param_count());
  double ham = 0.0;
  for (auto& p : parts) {
    if (p.failed) throw NumericError(p.error);
    delta += p.delta;
    ham += p.stat;
  }
  if (mean_hamiltonian) *mean_hamiltonian = ham / static_cast<double>(m);
  return delta;
}

EvalSums evaluate_batch(const ProblemSpec& problem, const CriticNet& critic,
                        const ShallowNet& actor, const RowMat& points) {
  if (!problem.has_analytic()) {
    throw ConfigError("problem has no analytic solution to evaluate against");
  }
  const std::size_t m = static_cast<std::size_t>(points.rows());
  const int k = problem.action_dim;
  const MatrixXd inner_sq = critic.z.inner().array().square().matrix();
  const std::size_t nchunks = chunk_count(m, kChunkRows);
  struct Part {
    EvalSums sums;
    bool failed = false;
    std::string error;
  };
  std::vector<Part> parts(nchunks);

  parallel_chunks(m, kChunkRows, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto w = WorkPool::instance().acquire();
    auto& part = parts[c];
    try {
      critic_chunk_eval(critic, inner_sq, points, b, e, *w, /*need_second=*/false);
      actor_chunk_eval(actor, problem, *w);
      const Eigen::Index rows = w->X.rows();
      std::vector<double> ustar(k);
      for (Eigen::Index r = 0; r < rows; ++r) {
        const std::span<const double> x{w->X.data() + r * w->X.cols(),
                                        static_cast<std::size_t>(w->X.cols())};
        const double v = problem.value_field->value(x);
        const double dq = w->Q(r) - v;
        part.sums.critic_sq += dq * dq;
        part.sums.value_sq += v * v;
        problem.optimal_control(x, ustar);
        for (int l = 0; l < k; ++l) {
          const double du = w->A(r, l) - ustar[l];
          part.sums.actor_sq += du * du;
          part.sums.control_sq += ustar[l] * ustar[l];
        }
        ++part.sums.count;
      }
    } catch (const std::exception& ex) {
      part.failed = true;
      part.error = ex.what();
    }
    WorkPool::instance().release(std::move(w));
  });

  EvalSums total;
  for (auto& p : parts) {
    if (p.failed) throw NumericError(p.error);
    total.critic_sq += p.sums.critic_sq;
    total.value_sq += p.sums.value_sq;
    total.actor_sq += p.sums.actor_sq;
    total.control_sq += p.sums.control_sq;
    total.count += p.sums.count;
  }
  return total;
}

}  // namespace hjbac
