#pragma once

#include <string>
#include <vector>

#include "critic.hpp"
#include "problem.hpp"

namespace hjbac {

struct McConfig {
  double dt = 1e-3;
  int paths_per_point = 2000;
  int eval_points = 1000;
  double max_time = 200.0;  // horizon cap; capped paths are censored
  std::uint64_t seed = 0;

  void validate() const;
};

/// Monte Carlo estimate of the discounted cost of running the actor from x.
struct PathEstimate {
  double mean_cost = 0.0;
  double std_error = 0.0;  // NaN when only one path was run
  double mean_exit_time = 0.0;
  double censored_fraction = 0.0;
};

/// Euler-Maruyama simulation of the controlled SDE started at x:
/// X <- X + b dt + Phi sqrt(dt) xi, left-endpoint discounted running cost,
/// boundary crossing resolved by linear interpolation, horizon-capped paths
/// contribute the boundary interpolant value and are flagged censored.
/// Paths use counter-based per-path streams keyed by (seed, point_tag, path),
/// so results do not depend on threading.
PathEstimate simulate_value(const ProblemSpec& problem, const ShallowNet& actor,
                            std::span<const double> x, const McConfig& cfg,
                            std::uint64_t point_tag = 0);

struct AgreementRow {
  VectorXd x;
  double value = 0.0;     // analytic V
  double critic = 0.0;    // Q
  double mc = 0.0;        // simulated V^u
  double std_error = 0.0;
  double exit_mean = 0.0;
  double censored_fraction = 0.0;
};

struct HistogramSpec {
  std::string name;
  std::vector<double> bin_left, bin_right;
  std::vector<long> count;
};

/// Actor-critic agreement metrics over eval_points mu-samples:
/// E1 = mean (V - V_mc)^2, E2 = mean (V - Q)^2, E3 = mean (Q - V_mc)^2,
/// with 50-bin signed-difference histograms spanning the observed ranges.
struct AgreementReport {
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  std::vector<AgreementRow> rows;
  std::vector<HistogramSpec> histograms;  // v_minus_mc, v_minus_critic, critic_minus_mc
};

AgreementReport agreement_report(const ProblemSpec& problem, const ShallowNet& actor,
                                 const CriticNet& critic, const McConfig& cfg);

namespace mc_detail {

/// Crossing parameter theta in [0, 1] where x + theta*step meets the boundary.
double crossing_theta(const DomainSpec& dom, std::span<const double> x,
                      std::span<const double> step);

/// If x + step leaves the domain, writes the interpolated crossing point
/// (snapped exactly onto the face for boxes) into out and returns true.
bool apply_crossing(const DomainSpec& dom, std::span<const double> x,
                    std::span<const double> step, std::span<double> out);

}  // namespace mc_detail

}  // namespace hjbac
