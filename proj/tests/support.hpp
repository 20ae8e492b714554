#pragma once

// Shared helpers for the test suites: independent oracles (high-precision
// summation, finite differences, dense-Hessian generator evaluation) and a
// least-squares fit of network outer weights to analytic targets.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "critic.hpp"
#include "generator.hpp"
#include "problem.hpp"

namespace hjbac::testsupport {

inline double rel_err(double got, double want, double floor = 1e-12) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

/// Relative error of a vector against a reference, normalized by the
/// reference's sup norm (treats small components at the vector's own scale).
inline double vector_rel_err(std::span<const double> got, std::span<const double> want,
                             double scale_floor = 1e-12) {
  double diff = 0.0, scale = scale_floor;
  for (std::size_t i = 0; i < got.size(); ++i) {
    diff = std::max(diff, std::abs(got[i] - want[i]));
    scale = std::max(scale, std::abs(want[i]));
  }
  return diff / scale;
}

/// Long-double Kahan-compensated forward pass, independent of the library's
/// evaluation order and precision.
inline double forward_longdouble(const ShallowNet& net, std::span<const double> x, int out) {
  const auto outer = net.outer();
  const auto inner = net.inner();
  const auto bias = net.bias();
  long double sum = 0.0L, comp = 0.0L;
  for (int i = 0; i < net.width(); ++i) {
    long double t = bias(i);
    for (int j = 0; j < net.input_dim(); ++j) {
      t += static_cast<long double>(inner(i, j)) * x[j];
    }
    const long double term = static_cast<long double>(outer(out, i)) * tanhl(t);
    const long double y = term - comp;
    const long double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return static_cast<double>(powl(static_cast<long double>(net.width()),
                                  -static_cast<long double>(net.beta())) *
                             sum);
}

/// Central finite difference of a scalar function of one scalar variable.
template <typename F>
double central_diff(F&& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

/// Dense-evaluation generator oracle: assembles grad Q and the full Hessian
/// and contracts Tr(Phi Phi' Hess Q) entry-wise.
inline double generator_dense(const ProblemSpec& problem, const CriticNet& critic,
                              std::span<const double> x, std::span<const double> a) {
  const int d = problem.domain.dim;
  const CriticPointEval ev = critic_point_eval(critic, x);
  MatrixXd H(d, d);
  ev.hessian({H.data(), static_cast<std::size_t>(d) * d});
  MatrixXd phi(d, problem.noise_dim);
  std::vector<double> col(d);
  for (int j = 0; j < problem.noise_dim; ++j) {
    problem.diffusion_column(x, a, j, col);
    for (int i = 0; i < d; ++i) phi(i, j) = col[i];
  }
  VectorXd b(d);
  problem.drift(x, a, {b.data(), static_cast<std::size_t>(d)});
  const double trace = (phi * phi.transpose() * H).trace();
  return b.dot(ev.grad) + 0.5 * trace + problem.running_cost(x, a) -
         problem.gamma * ev.value;
}

/// Fits the outer weights of a randomly-initialized scalar network to target
/// values by ridge-regularized least squares (inner weights and biases stay
/// at their initialization).
inline ShallowNet fit_scalar_net(const std::function<double(std::span<const double>)>& target,
                                 const DomainSpec& dom, int width, int samples, double beta,
                                 std::uint64_t seed, double ridge = 1e-10) {
  ShallowNet net = ShallowNet::init(width, dom.dim, 1, beta, {.seed = seed});
  RngStream rng(derive_seed(seed, 991));
  const RowMat pts = sample_interior(dom, samples, rng);
  MatrixXd feats(samples, width);
  VectorXd y(samples);
  const double s = net.output_scale();
  for (int r = 0; r < samples; ++r) {
    const std::span<const double> x{pts.data() + static_cast<Eigen::Index>(r) * dom.dim,
                                    static_cast<std::size_t>(dom.dim)};
    VectorXd t = net.inner() * as_vec(x) + net.bias();
    feats.row(r) = s * t.array().tanh().matrix().transpose();
    y(r) = target(x);
  }
  const MatrixXd gram =
      feats.transpose() * feats + ridge * MatrixXd::Identity(width, width);
  const VectorXd h = gram.ldlt().solve(feats.transpose() * y);
  net.outer().row(0) = h.transpose();
  return net;
}

/// Critic inner network fitted so that Q = Z eta + gbar matches the analytic
/// value function: Z targets (V - gbar)/eta, which is smooth on the interior.
inline ShallowNet fit_critic_z(const ProblemSpec& problem, int width, int samples,
                               double beta, std::uint64_t seed, double ridge = 1e-10) {
  const auto target = [&](std::span<const double> x) {
    return (problem.value_field->value(x) - problem.gbar->value(x)) /
           problem.domain.eta(x);
  };
  return fit_scalar_net(target, problem.domain, width, samples, beta, seed, ridge);
}

/// Actor network fitted per output coordinate to the analytic control.
inline ShallowNet fit_actor(const ProblemSpec& problem, int width, int samples, double beta,
                            std::uint64_t seed, double ridge = 1e-10) {
  const DomainSpec& dom = problem.domain;
  const int k = problem.action_dim;
  ShallowNet net = ShallowNet::init(width, dom.dim, k, beta, {.seed = seed});
  RngStream rng(derive_seed(seed, 992));
  const RowMat pts = sample_interior(dom, samples, rng);
  MatrixXd feats(samples, width);
  MatrixXd y(samples, k);
  std::vector<double> u(k);
  const double s = net.output_scale();
  for (int r = 0; r < samples; ++r) {
    const std::span<const double> x{pts.data() + static_cast<Eigen::Index>(r) * dom.dim,
                                    static_cast<std::size_t>(dom.dim)};
    VectorXd t = net.inner() * as_vec(x) + net.bias();
    feats.row(r) = s * t.array().tanh().matrix().transpose();
    problem.optimal_control(x, u);
    for (int l = 0; l < k; ++l) y(r, l) = u[l];
  }
  const MatrixXd gram =
      feats.transpose() * feats + ridge * MatrixXd::Identity(width, width);
  const Eigen::LDLT<MatrixXd> solver(gram);
  for (int l = 0; l < k; ++l) {
    net.outer().row(l) = solver.solve(feats.transpose() * y.col(l)).transpose();
  }
  return net;
}

/// A degenerate one-neuron network whose output is the constant c
/// (inner weights zero, bias 1, outer weight c/tanh(1)).
inline ShallowNet constant_net(int input_dim, int output_dim, double c, double beta = 0.75) {
  ShallowNet net(1, input_dim, output_dim, beta);
  net.bias()(0) = 1.0;
  for (int l = 0; l < output_dim; ++l) net.outer()(l, 0) = c / std::tanh(1.0);
  return net;
}

}  // namespace hjbac::testsupport
