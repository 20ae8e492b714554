#include "engine.hpp"

#include "math_util.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace hjbac {

namespace {

std::span<const double> row_span(const RowMat& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

std::span<double> row_span(RowMat& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

struct PoolState {
  std::mutex mu;
  std::vector<std::unique_ptr<ChunkWork>> free_list;
};

PoolState& pool_state() {
  static PoolState s;
  return s;
}

}  // namespace

std::unique_ptr<ChunkWork> WorkPool::acquire() {
  auto& s = pool_state();
  std::lock_guard<std::mutex> lock(s.mu);
  if (s.free_list.empty()) return std::make_unique<ChunkWork>();
  auto w = std::move(s.free_list.back());
  s.free_list.pop_back();
  return w;
}

void WorkPool::release(std::unique_ptr<ChunkWork> w) {
  auto& s = pool_state();
  std::lock_guard<std::mutex> lock(s.mu);
  s.free_list.push_back(std::move(w));
}

WorkPool& WorkPool::instance() {
  static WorkPool p;
  return p;
}

void critic_chunk_eval(const CriticNet& critic, const MatrixXd& inner_sq,
                       const RowMat& points, std::size_t begin, std::size_t end,
                       ChunkWork& w, bool need_second) {
  const auto& net = critic.z;
  const int d = net.input_dim();
  const int N = net.width();
  const Eigen::Index rows = static_cast<Eigen::Index>(end - begin);
  const double s = net.output_scale();
  const auto inner = net.inner();
  const Eigen::RowVectorXd c_row = net.outer().row(0);

  w.X = points.middleRows(static_cast<Eigen::Index>(begin), rows);
  w.Tc.resize(rows, N);
  w.Tc.noalias() = w.X * inner.transpose();
  w.Tc.rowwise() += net.bias().transpose();
  tanh_into(w.Tc, w.S0c);
  w.S1c = ((1.0 - w.S0c.array().square()).rowwise() * c_row.array()).matrix();
  w.Z.noalias() = s * (w.S0c * c_row.transpose());
  w.Gz.resize(rows, d);
  w.Gz.noalias() = s * (w.S1c * inner);
  if (need_second) {
    w.S2c = (-2.0 * w.S0c.array() * w.S1c.array()).matrix();
    w.Hzd.resize(rows, d);
    w.Hzd.noalias() = s * (w.S2c * inner_sq);
  }

  // eta and its derivatives
  const auto& dom = critic.domain;
  w.etav.resize(rows);
  w.etag.resize(rows, d);
  if (need_second) w.etahd.resize(rows, d);
  if (dom.kind == DomainKind::ball) {
    const double R2 = dom.radius * dom.radius;
    w.etav = (R2 - w.X.array().square().rowwise().sum()).matrix();
    w.etag = -2.0 * w.X;
    if (need_second) w.etahd.setConstant(-2.0);
  } else {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto x = row_span(w.X, r);
      w.etav(r) = dom.eta(x);
      dom.eta_gradient(x, row_span(w.etag, r));
      if (need_second) dom.eta_hessian_diag(x, row_span(w.etahd, r));
    }
  }

  // Q = Z eta + gbar, with the product-rule derivatives
  const ScalarField& gbar = *critic.gbar;
  w.Q = (w.Z.array() * w.etav.array()).matrix();
  w.GradQ.resize(rows, d);
  w.GradQ = ((w.Gz.array().colwise() * w.etav.array()) +
             (w.etag.array().colwise() * w.Z.array()))
                .matrix();
  if (need_second) {
    w.HQd.resize(rows, d);
    w.HQd = ((w.Hzd.array().colwise() * w.etav.array()) +
             2.0 * w.Gz.array() * w.etag.array() +
             (w.etahd.array().colwise() * w.Z.array()))
                .matrix();
  }
  if (gbar.is_constant()) {
    const double g0 = gbar.value(row_span(w.X, 0));
    w.Q.array() += g0;
  } else {
    w.buf_a.resize(d);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto x = row_span(w.X, r);
      w.Q(r) += gbar.value(x);
      gbar.gradient(x, w.buf_a);
      for (int i = 0; i < d; ++i) w.GradQ(r, i) += w.buf_a[i];
      if (need_second) {
        gbar.hessian_diag(x, w.buf_a);
        for (int i = 0; i < d; ++i) w.HQd(r, i) += w.buf_a[i];
      }
    }
  }
}

void actor_chunk_eval(const ShallowNet& actor, const ProblemSpec& problem, ChunkWork& w) {
  const Eigen::Index rows = w.X.rows();
  const int N = actor.width();
  const int k = actor.output_dim();
  w.Ta.resize(rows, N);
  w.Ta.noalias() = w.X * actor.inner().transpose();
  w.Ta.rowwise() += actor.bias().transpose();
  tanh_into(w.Ta, w.S0a);
  w.S1a = (1.0 - w.S0a.array().square()).matrix();
  w.Araw.resize(rows, k);
  w.Araw.noalias() = actor.output_scale() * (w.S0a * actor.outer().transpose());
  w.A = w.Araw;
  w.clamp_gate.resize(rows, k);
  w.clamp_gate.setOnes();
  if (problem.action_clamp) {
    const auto& cl = *problem.action_clamp;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int l = 0; l < k; ++l) {
        const double raw = w.Araw(r, l);
        if (raw <= cl.lo(l)) {
          w.A(r, l) = cl.lo(l);
          w.clamp_gate(r, l) = 0.0;
        } else if (raw >= cl.hi(l)) {
          w.A(r, l) = cl.hi(l);
          w.clamp_gate(r, l) = 0.0;
        }
      }
    }
  }
}

namespace {

// Accumulates (1/2) col' HessQ col over the chunk for one diffusion column
// already stored in w.Col, into w.quad_sum.
void accumulate_column_quad(const CriticNet& critic, ChunkWork& w) {
  const auto& net = critic.z;
  const double s = net.output_scale();
  const Eigen::Index rows = w.X.rows();
  const int d = net.input_dim();
  w.Gcol.resize(rows, net.width());
  w.Gcol.noalias() = w.Col * net.inner().transpose();
  // z-part quadratic form and gradient dot per row
  w.vec_a = s * (w.S2c.array() * w.Gcol.array().square()).rowwise().sum().matrix();
  w.vec_b = s * (w.S1c.array() * w.Gcol.array()).rowwise().sum().matrix();
  w.vec_c = (w.etag.array() * w.Col.array()).rowwise().sum().matrix();
  const VectorXd& zquad = w.vec_a;
  const VectorXd& zdot = w.vec_b;
  const VectorXd& edot = w.vec_c;
  const auto& dom = critic.domain;
  const ScalarField& gbar = *critic.gbar;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto x = row_span(w.X, r);
    const auto col = row_span(w.Col, r);
    double quad = w.etav(r) * zquad(r) + 2.0 * zdot(r) * edot(r) +
                  w.Z(r) * dom.eta_hessian_quad(x, col);
    if (!gbar.is_constant()) quad += gbar.hessian_quad(x, col);
    w.quad_sum(r) += 0.5 * quad;
  }
}

}  // namespace

void generator_chunk(const ProblemSpec& problem, const CriticNet& critic, ChunkWork& w) {
  const Eigen::Index rows = w.X.rows();
  const int d = problem.domain.dim;
  w.Lval.resize(rows);
  w.Hval.resize(rows);
  w.buf_a.resize(d);  // drift
  if (problem.diffusion_form == DiffusionForm::diagonal) {
    w.buf_b.resize(d);  // diffusion diagonal
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto x = row_span(w.X, r);
      const auto a = row_span(w.A, r);
      problem.drift(x, a, w.buf_a);
      problem.diffusion_diag(x, a, w.buf_b);
      double v = problem.running_cost(x, a) - problem.gamma * w.Q(r);
      for (int i = 0; i < d; ++i) {
        v += w.buf_a[i] * w.GradQ(r, i) + 0.5 * w.buf_b[i] * w.buf_b[i] * w.HQd(r, i);
      }
      w.Lval(r) = v;
      w.Hval(r) = v + problem.gamma * w.Q(r);
    }
  } else {
    w.quad_sum.resize(rows);
    w.quad_sum.setZero();
    w.Col.resize(rows, d);
    for (int j = 0; j < problem.noise_dim; ++j) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        problem.diffusion_column(row_span(w.X, r), row_span(w.A, r), j, row_span(w.Col, r));
      }
      accumulate_column_quad(critic, w);
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto x = row_span(w.X, r);
      const auto a = row_span(w.A, r);
      problem.drift(x, a, w.buf_a);
      double v = w.quad_sum(r) + problem.running_cost(x, a) - problem.gamma * w.Q(r);
      for (int i = 0; i < d; ++i) v += w.buf_a[i] * w.GradQ(r, i);
      w.Lval(r) = v;
      w.Hval(r) = v + problem.gamma * w.Q(r);
    }
  }
  if (!w.Lval.allFinite()) {
    throw NumericError("generator produced non-finite values over a batch chunk");
  }
}

void du_hamiltonian_chunk(const ProblemSpec& problem, const CriticNet& critic, ChunkWork& w,
                          double fd_step) {
  const Eigen::Index rows = w.X.rows();
  const int d = problem.domain.dim;
  const int k = problem.action_dim;
  w.dUH.resize(rows, k);

  if (problem.du_hamiltonian_override && problem.diffusion_form == DiffusionForm::diagonal) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const CriticLocal local{w.Q(r), row_span(w.GradQ, r), row_span(w.HQd, r)};
      problem.du_hamiltonian_override(row_span(w.X, r), row_span(w.A, r), local,
                                      row_span(w.dUH, r));
    }
  } else if (problem.diffusion_form == DiffusionForm::diagonal) {
    // central differences; critic row data fixed, coefficients vary in a
    w.buf_a.resize(d);
    w.buf_b.resize(d);
    w.buf_c.resize(k);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto x = row_span(w.X, r);
      const auto a = row_span(w.A, r);
      std::copy(a.begin(), a.end(), w.buf_c.begin());
      std::span<double> ap{w.buf_c.data(), static_cast<std::size_t>(k)};
      auto ham = [&](std::span<const double> act) {
        problem.drift(x, act, w.buf_a);
        problem.diffusion_diag(x, act, w.buf_b);
        double h = problem.running_cost(x, act);
        for (int i = 0; i < d; ++i) {
          h += w.buf_a[i] * w.GradQ(r, i) + 0.5 * w.buf_b[i] * w.buf_b[i] * w.HQd(r, i);
        }
        return h;
      };
      for (int l = 0; l < k; ++l) {
        const double a0 = ap[l];
        ap[l] = a0 + fd_step;
        const double hp = ham(ap);
        ap[l] = a0 - fd_step;
        const double hm = ham(ap);
        ap[l] = a0;
        w.dUH(r, l) = (hp - hm) / (2.0 * fd_step);
      }
    }
  } else {
    // columns form: the quadratic forms are re-evaluated per perturbed action
    // with batched column passes (2 per action coordinate).
    w.Col.resize(rows, d);
    w.buf_a.resize(d);
    RowMat h_side(rows, 2);
    w.buf_c.resize(k);
    for (int l = 0; l < k; ++l) {
      for (int side = 0; side < 2; ++side) {
        const double shift = side == 0 ? fd_step : -fd_step;
        w.quad_sum.resize(rows);
        w.quad_sum.setZero();
        for (int j = 0; j < problem.noise_dim; ++j) {
          for (Eigen::Index r = 0; r < rows; ++r) {
            const auto a = row_span(w.A, r);
            std::copy(a.begin(), a.end(), w.buf_c.begin());
            w.buf_c[l] += shift;
            problem.diffusion_column(row_span(w.X, r),
                                     {w.buf_c.data(), static_cast<std::size_t>(k)}, j,
                                     row_span(w.Col, r));
          }
          accumulate_column_quad(critic, w);
        }
        for (Eigen::Index r = 0; r < rows; ++r) {
          const auto x = row_span(w.X, r);
          const auto a = row_span(w.A, r);
          std::copy(a.begin(), a.end(), w.buf_c.begin());
          w.buf_c[l] += shift;
          const std::span<const double> ap{w.buf_c.data(), static_cast<std::size_t>(k)};
          problem.drift(x, ap, w.buf_a);
          double h = w.quad_sum(r) + problem.running_cost(x, ap);
          for (int i = 0; i < d; ++i) h += w.buf_a[i] * w.GradQ(r, i);
          h_side(r, side) = h;
        }
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        w.dUH(r, l) = (h_side(r, 0) - h_side(r, 1)) / (2.0 * fd_step);
      }
    }
  }
  if (!w.dUH.allFinite()) {
    throw NumericError("Hamiltonian derivative is non-finite over a batch chunk");
  }
}

void z_delta_accumulate(const ShallowNet& z, ChunkWork& w, const VectorXd& weights,
                        VectorXd& delta) {
  const int N = z.width();
  const int d = z.input_dim();
  const double s = z.output_scale();
  Eigen::Map<Eigen::RowVectorXd> d_outer(delta.data(), N);
  Eigen::Map<MatrixXd> d_inner(delta.data() + N, N, d);
  Eigen::Map<VectorXd> d_bias(delta.data() + N + static_cast<Eigen::Index>(N) * d, N);
  d_outer.noalias() += s * (weights.transpose() * w.S0c);
  w.scratch_mn = (w.S1c.array().colwise() * weights.array()).matrix();
  d_inner.noalias() += s * (w.scratch_mn.transpose() * w.X);
  d_bias.noalias() += s * w.scratch_mn.colwise().sum().transpose();
}

void actor_delta_accumulate(const ShallowNet& actor, ChunkWork& w, const RowMat& Psi,
                            VectorXd& delta) {
  const int N = actor.width();
  const int d = actor.input_dim();
  const int k = actor.output_dim();
  const double s = actor.output_scale();
  Eigen::Map<MatrixXd> d_outer(delta.data(), k, N);
  Eigen::Map<MatrixXd> d_inner(delta.data() + static_cast<Eigen::Index>(k) * N, N, d);
  Eigen::Map<VectorXd> d_bias(
      delta.data() + static_cast<Eigen::Index>(k) * N + static_cast<Eigen::Index>(N) * d, N);
  d_outer.noalias() += s * (Psi.transpose() * w.S0a);
  w.scratch_mn.resize(w.X.rows(), N);
  w.scratch_mn.noalias() = Psi * actor.outer();
  w.scratch_mn.array() *= w.S1a.array();
  d_inner.noalias() += s * (w.scratch_mn.transpose() * w.X);
  d_bias.noalias() += s * w.scratch_mn.colwise().sum().transpose();
}

}  // namespace hjbac
