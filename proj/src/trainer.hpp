#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critic.hpp"
#include "optim.hpp"
#include "problem.hpp"
#include "steps.hpp"
#include "truncation.hpp"

namespace hjbac {

enum class SchedulerKind { constant, inverse_cycle };
enum class TruncationChoice { identity, smooth };

/// Stream tags the trainer derives from the master seed; part of the
/// reproducibility contract (replays and tests reconstruct batches from
/// these).
namespace train_streams {
inline constexpr std::uint64_t kActorInit = 1;
inline constexpr std::uint64_t kCriticInit = 2;
inline constexpr std::uint64_t kCriticBatch = 3;
inline constexpr std::uint64_t kActorBatch = 4;
inline constexpr std::uint64_t kEval = 5;
}  // namespace train_streams

/// Training hyperparameters. One cycle is critic_steps_per_cycle critic
/// updates followed by actor_steps_per_cycle actor updates; learning-rate
/// decay is indexed by the completed-cycle count.
struct TrainConfig {
  int actor_width = 512;
  int critic_width = 512;
  double beta = 0.75;
  int critic_steps_per_cycle = 100;
  int actor_steps_per_cycle = 200;
  int critic_batch = 1024;
  int actor_batch = 1024;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamParams adam = {};
  double lr_critic = 1e-3;
  double lr_actor = 1e-3;
  SchedulerKind scheduler = SchedulerKind::constant;
  int total_cycles = 100;
  TruncationChoice truncation = TruncationChoice::identity;
  double truncation_delta = -1.0;  // < 0 picks (1 - beta)/5
  std::optional<double> loss_floor;
  bool ntk_rate_factor = false;
  std::uint64_t seed = 0;
  int eval_points = 4096;  // per-cycle metric sample count
  double divergence_threshold = 1e12;

  void validate() const;
};

struct MetricsRecord {
  int cycle = 0;
  long step = 0;
  std::string phase = "train";
  double critic_loss = 0.0;  // cycle mean of batch-mean (L Q)^2
  double actor_loss = 0.0;   // cycle mean of batch-mean H
  double mse_c = 0.0, re_c = 0.0, mse_a = 0.0, re_a = 0.0;
  double elapsed_s = 0.0;
};

using MetricsSink = std::function<void(const MetricsRecord&)>;

struct TrainResult {
  ShallowNet actor;
  ShallowNet critic_z;
  bool diverged = false;
  std::string divergence_reason;
  int cycles_run = 0;
  std::vector<MetricsRecord> history;
};

/// Runs the alternating actor-critic loop. Fresh i.i.d. uniform batch per
/// step; deterministic given the seed and the fixed chunk layout. On
/// divergence (non-finite or huge loss, or a numeric error from the
/// coefficients) the result carries the last end-of-cycle parameters and the
/// diverged flag. record_wall_time=false writes zeros to elapsed_s, which
/// makes replayed runs byte-identical. warm_actor/warm_critic, when given,
/// replace the seeded initialization (dimensions must match).
TrainResult train(const ProblemSpec& problem, const TrainConfig& cfg,
                  const MetricsSink& sink = nullptr, bool record_wall_time = true,
                  const ShallowNet* warm_actor = nullptr,
                  const ShallowNet* warm_critic = nullptr);

struct EvalMetrics {
  double mse_c = 0.0, re_c = 0.0, mse_a = 0.0, re_a = 0.0;
};

/// MSE and relative error of (Q, U) against the analytic pair over
/// sample_count fresh mu-samples; RE is the ratio of sums.
EvalMetrics evaluate(const ProblemSpec& problem, const ShallowNet& actor,
                     const CriticNet& critic, int sample_count, RngStream& rng);

/// Assembles the critic from a trained/loaded inner network and the problem's
/// eta and boundary data.
CriticNet critic_for_problem(const ProblemSpec& problem, ShallowNet z);

TruncationFamily truncation_for(const TrainConfig& cfg, int width);

}  // namespace hjbac
