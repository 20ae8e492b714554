#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "domain.hpp"
#include "fields.hpp"

namespace hjbac {

enum class DiffusionForm { diagonal, columns };

/// Per-coordinate action-space bounds, applied element-wise to actor output.
struct ActionBounds {
  VectorXd lo, hi;
};

/// Point-local critic data handed to analytic Hamiltonian-derivative
/// overrides (diagonal-diffusion problems only).
struct CriticLocal {
  double value = 0.0;
  std::span<const double> grad;
  std::span<const double> hess_diag;
};

/// A stationary stochastic-control problem: domain, controlled drift and
/// diffusion, running cost, discount, boundary interpolant, and optionally
/// the analytic value function / optimal control for benchmarking.
struct ProblemSpec {
  std::string name;
  DomainSpec domain;
  int action_dim = 1;
  int noise_dim = 1;
  double gamma = 0.0;

  DiffusionForm diffusion_form = DiffusionForm::diagonal;

  using DriftFn = std::function<void(std::span<const double>, std::span<const double>,
                                     std::span<double>)>;
  using DiffDiagFn = DriftFn;
  using DiffColFn = std::function<void(std::span<const double>, std::span<const double>, int,
                                       std::span<double>)>;
  using CostFn = std::function<double(std::span<const double>, std::span<const double>)>;
  using ControlFn = std::function<void(std::span<const double>, std::span<double>)>;
  using DuHFn = std::function<void(std::span<const double>, std::span<const double>,
                                   const CriticLocal&, std::span<double>)>;

  DriftFn drift;
  /// Diagonal diffusion entries (noise_dim == dim); set when form is diagonal.
  DiffDiagFn diffusion_diag;
  /// Column j of the d x d' diffusion matrix; always available.
  DiffColFn diffusion_column;
  CostFn running_cost;
  std::shared_ptr<const ScalarField> gbar;
  std::optional<ActionBounds> action_clamp;

  std::shared_ptr<const ScalarField> value_field;  // V
  ControlFn optimal_control;                       // u*
  /// Analytic d/da of the Hamiltonian given critic point data; when absent
  /// the generator falls back to central finite differences in the action.
  DuHFn du_hamiltonian_override;

  bool has_analytic() const { return value_field && static_cast<bool>(optimal_control); }

  void clamp_action(std::span<double> a) const;

  /// Hamiltonian gap H(a, V)(x) - gamma V(x); zero exactly at a = u*(x) and
  /// non-negative when u* is the pointwise minimizer. Requires analytic V.
  double zeta(std::span<const double> x, std::span<const double> a) const;

  void validate() const;
};

/// Controlled-diffusion variant of the linear-quadratic regulator on the
/// ball B(0, R) with analytic solution V = k |x|^2.
ProblemSpec make_lqr(int dim, double p, double q, double xi, double gamma, double R,
                     double eps);

/// Value of the LQR constant k = (sqrt(q^2 g^2 + 4 p q xi^2) - g q) / (2 xi^2).
double lqr_gain(double p, double q, double xi, double gamma);

/// Ingredients for a reverse-engineered benchmark: pick (V, u*, b, Phi, zeta)
/// and the running cost is assembled so that V solves the resulting equation.
struct ConstructedSpec {
  std::string name;
  DomainSpec domain;
  int action_dim = 1;
  int noise_dim = 1;
  double gamma = 0.0;
  DiffusionForm diffusion_form = DiffusionForm::diagonal;
  ProblemSpec::DriftFn drift;
  ProblemSpec::DiffDiagFn diffusion_diag;
  ProblemSpec::DiffColFn diffusion_column;
  std::shared_ptr<const ScalarField> value_field;
  ProblemSpec::ControlFn optimal_control;
  ProblemSpec::CostFn zeta;  // >= 0, zero iff a = u*(x)
  double gbar_constant = 0.0;
  std::optional<ActionBounds> action_clamp;
  ProblemSpec::DuHFn du_hamiltonian_override;
};

ProblemSpec make_constructed(const ConstructedSpec& spec);

/// Named benchmark catalog. dim is honored only where the benchmark family
/// varies it (lqr, problem1); other presets are fixed-dimension.
ProblemSpec preset(const std::string& name, std::optional<int> dim = std::nullopt);
std::vector<std::string> catalog();

}  // namespace hjbac
