#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace hjbac {

enum class OuterDist { uniform_pm1 };
enum class InnerDist { std_normal };
enum class BiasDist { uniform_pm1 };

struct InitSpec {
  OuterDist outer = OuterDist::uniform_pm1;
  InnerDist inner = InnerDist::std_normal;
  BiasDist bias = BiasDist::uniform_pm1;
  std::uint64_t seed = 0;
};

/// One-hidden-layer tanh network with 1/N^beta output scaling,
///   out_l(x) = N^(-beta) * sum_i outer(l,i) * tanh(inner_row_i . x + bias_i).
/// Parameters live in one flat vector; outer/inner/bias are views into it so
/// an optimizer can treat the network as a single coefficient vector.
class ShallowNet {
 public:
  ShallowNet() = default;
  ShallowNet(int width, int input_dim, int output_dim, double beta);

  static ShallowNet init(int width, int input_dim, int output_dim, double beta,
                         const InitSpec& spec);

  int width() const { return width_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  double beta() const { return beta_; }
  std::uint64_t init_seed() const { return init_seed_; }
  void set_init_seed(std::uint64_t s) { init_seed_ = s; }
  /// N^(-beta).
  double output_scale() const { return scale_; }
  int param_count() const { return static_cast<int>(params_.size()); }

  VectorXd& params() { return params_; }
  const VectorXd& params() const { return params_; }

  // Views into the flat parameter vector (column-major blocks).
  Eigen::Map<MatrixXd> outer();
  Eigen::Map<const MatrixXd> outer() const;
  Eigen::Map<MatrixXd> inner();
  Eigen::Map<const MatrixXd> inner() const;
  Eigen::Map<VectorXd> bias();
  Eigen::Map<const VectorXd> bias() const;

  void forward(std::span<const double> x, std::span<double> out) const;
  VectorXd forward(std::span<const double> x) const;
  /// Scalar forward for output_dim == 1.
  double forward1(std::span<const double> x) const;

  bool finite() const { return params_.allFinite(); }

 private:
  int width_ = 0, input_dim_ = 0, output_dim_ = 0;
  double beta_ = 0.75;
  double scale_ = 1.0;
  std::uint64_t init_seed_ = 0;
  VectorXd params_;
};

/// Per-point weighted parameter gradient, accumulated in point-index order:
///   delta = sum_j <weight_j, grad_theta out(x_j)>.
/// points has one x per row; weights is points.rows() x output_dim.
VectorXd actor_param_gradient_accumulate(const ShallowNet& net, const RowMat& points,
                                         const RowMat& weights);

/// Cached single-point evaluation of a scalar (output_dim == 1) network with
/// analytic input derivatives up to second order.
struct NetPointEval {
  double value = 0.0;
  VectorXd grad;          // d
  VectorXd act;           // sigma(t_i), width
  VectorXd c_act_prime;   // outer_i * sigma'(t_i), width
  VectorXd c_act_dd;      // outer_i * sigma''(t_i), width
  double scale = 1.0;
  const ShallowNet* net = nullptr;

  /// a' Hess a, using sum_i outer_i sigma''(t_i) (w_i . a)^2.
  double hess_quad(std::span<const double> a) const;
  /// Directional gradient g . a without forming the full gradient again.
  double grad_dot(std::span<const double> a) const;
  void hess_diag(std::span<double> out) const;
  void hessian(std::span<double> out_dxd) const;
};

NetPointEval net_point_eval(const ShallowNet& net, std::span<const double> x);

// Versioned JSON checkpoint.
void save_net(const ShallowNet& net, const std::string& path);
ShallowNet load_net(const std::string& path);

}  // namespace hjbac
