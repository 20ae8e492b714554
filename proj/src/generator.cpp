#include "generator.hpp"

#include <cmath>
#include <sstream>

namespace hjbac {

namespace {

std::string point_str(std::span<const double> x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ')';
  return os.str();
}

// b . grad Q + (1/2) sum_cols col' HessQ col + c(x, a); the critic terms are
// the source's cached values at x, so only the coefficients depend on a.
double hamiltonian_for_action(const ProblemSpec& problem, const CriticSource& q,
                              std::span<const double> x, std::span<const double> a) {
  const int d = problem.domain.dim;
  thread_local std::vector<double> b, col;
  b.resize(d);
  col.resize(d);
  problem.drift(x, a, b);
  double h = q.grad().dot(as_vec(b)) + problem.running_cost(x, a);
  const double inv_sqrt2 = 0.70710678118654752440;
  for (int j = 0; j < problem.noise_dim; ++j) {
    problem.diffusion_column(x, a, j, col);
    for (int i = 0; i < d; ++i) col[i] *= inv_sqrt2;
    h += q.hess_quad(col);
  }
  return h;
}

}  // namespace

GeneratorEval generator(const ProblemSpec& problem, CriticSource& q,
                        std::span<const double> x, std::span<const double> a,
                        bool want_du_hamiltonian, double fd_step) {
  const int d = problem.domain.dim;
  const int k = problem.action_dim;
  GeneratorEval out;

  // Spelled out as the sum over columns of dir2(col/sqrt(2), b/(2 d')):
  // each term contributes (1/2) col' HessQ col + b . gradQ / d'.
  thread_local std::vector<double> b, col, shift;
  b.resize(d);
  col.resize(d);
  shift.resize(d);
  problem.drift(x, a, b);
  const double inv_sqrt2 = 0.70710678118654752440;
  const double shift_scale = 1.0 / (2.0 * problem.noise_dim);
  for (int i = 0; i < d; ++i) shift[i] = b[i] * shift_scale;
  double dir2_sum = 0.0;
  for (int j = 0; j < problem.noise_dim; ++j) {
    problem.diffusion_column(x, a, j, col);
    for (int i = 0; i < d; ++i) col[i] *= inv_sqrt2;
    dir2_sum += q.hess_quad(col) + 2.0 * q.grad().dot(as_vec(shift));
  }
  const double qv = q.value();
  const double cost = problem.running_cost(x, a);
  out.value = dir2_sum + cost - problem.gamma * qv;
  out.hamiltonian = out.value + problem.gamma * qv;
  if (!std::isfinite(out.value)) {
    throw NumericError("generator produced a non-finite value at x=" + point_str(x));
  }

  if (want_du_hamiltonian) {
    out.du_hamiltonian.resize(k);
    if (problem.du_hamiltonian_override && problem.diffusion_form == DiffusionForm::diagonal) {
      thread_local std::vector<double> hd;
      hd.resize(d);
      q.hess_diag(hd);
      const CriticLocal local{qv, {q.grad().data(), static_cast<std::size_t>(d)}, hd};
      problem.du_hamiltonian_override(x, a, local,
                                      {out.du_hamiltonian.data(), static_cast<std::size_t>(k)});
    } else {
      thread_local std::vector<double> ap;
      ap.assign(a.begin(), a.end());
      for (int l = 0; l < k; ++l) {
        const double a0 = ap[l];
        ap[l] = a0 + fd_step;
        const double hp = hamiltonian_for_action(problem, q, x, ap);
        ap[l] = a0 - fd_step;
        const double hm = hamiltonian_for_action(problem, q, x, ap);
        ap[l] = a0;
        out.du_hamiltonian(l) = (hp - hm) / (2.0 * fd_step);
      }
    }
    if (!out.du_hamiltonian.allFinite()) {
      throw NumericError("Hamiltonian derivative is non-finite at x=" + point_str(x));
    }
  }
  return out;
}

}  // namespace hjbac
