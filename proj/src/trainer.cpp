#include "trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace hjbac {

namespace {

using namespace train_streams;

double scheduler_factor(SchedulerKind kind, int cycle) {
  return kind == SchedulerKind::constant ? 1.0 : 1.0 / (1.0 + cycle);
}

}  // namespace

void TrainConfig::validate() const {
  if (actor_width < 1 || critic_width < 1) throw ConfigError("widths must be >= 1");
  if (!(beta > 0.5 && beta < 1.0)) throw ConfigError("beta must lie in (0.5, 1)");
  if (critic_steps_per_cycle < 0 || actor_steps_per_cycle < 0) {
    throw ConfigError("steps per cycle must be >= 0");
  }
  if (critic_batch < 1 || actor_batch < 1) throw ConfigError("batch sizes must be >= 1");
  if (total_cycles < 0) throw ConfigError("total_cycles must be >= 0");
  if (lr_actor < 0.0 || lr_critic < 0.0) throw ConfigError("learning rates must be >= 0");
  if (eval_points < 1) throw ConfigError("eval_points must be >= 1");
  if (truncation == TruncationChoice::smooth && truncation_delta >= 0.0 &&
      !(truncation_delta > 0.0 && truncation_delta < (1.0 - beta) / 4.0)) {
    throw ConfigError("truncation delta must lie in (0, (1-beta)/4)");
  }
}

TruncationFamily truncation_for(const TrainConfig& cfg, int width) {
  if (cfg.truncation == TruncationChoice::identity) return TruncationFamily::identity();
  return TruncationFamily(width, cfg.beta, cfg.truncation_delta, TruncationMode::smooth);
}

CriticNet critic_for_problem(const ProblemSpec& problem, ShallowNet z) {
  return make_critic(std::move(z), problem.domain, problem.gbar);
}

EvalMetrics evaluate(const ProblemSpec& problem, const ShallowNet& actor,
                     const CriticNet& critic, int sample_count, RngStream& rng) {
  if (sample_count < 1) throw ConfigError("evaluation sample count must be >= 1");
  const RowMat points = sample_interior(problem.domain, sample_count, rng);
  const EvalSums s = evaluate_batch(problem, critic, actor, points);
  EvalMetrics m;
  const double n = static_cast<double>(s.count);
  m.mse_c = s.critic_sq / n;
  m.mse_a = s.actor_sq / n;
  // relative error as the ratio of sums (scale-consistent even where V crosses zero)
  m.re_c = s.value_sq > 0.0 ? s.critic_sq / s.value_sq : std::numeric_limits<double>::quiet_NaN();
  m.re_a =
      s.control_sq > 0.0 ? s.actor_sq / s.control_sq : std::numeric_limits<double>::quiet_NaN();
  return m;
}

TrainResult train(const ProblemSpec& problem, const TrainConfig& cfg, const MetricsSink& sink,
                  bool record_wall_time, const ShallowNet* warm_actor,
                  const ShallowNet* warm_critic) {
  cfg.validate();
  problem.validate();

  TrainResult res;
  if (warm_actor) {
    if (warm_actor->input_dim() != problem.domain.dim ||
        warm_actor->output_dim() != problem.action_dim) {
      throw ConfigError("warm-start actor does not match the problem");
    }
    res.actor = *warm_actor;
  } else {
    res.actor = ShallowNet::init(cfg.actor_width, problem.domain.dim, problem.action_dim,
                                 cfg.beta, {.seed = derive_seed(cfg.seed, kActorInit)});
  }
  if (warm_critic) {
    if (warm_critic->input_dim() != problem.domain.dim || warm_critic->output_dim() != 1) {
      throw ConfigError("warm-start critic does not match the problem");
    }
    res.critic_z = *warm_critic;
  } else {
    res.critic_z = ShallowNet::init(cfg.critic_width, problem.domain.dim, 1, cfg.beta,
                                    {.seed = derive_seed(cfg.seed, kCriticInit)});
  }

  const TruncationFamily critic_fam = truncation_for(cfg, cfg.critic_width);
  const TruncationFamily actor_fam = truncation_for(cfg, cfg.actor_width);
  // The analyzed dynamics carry width^(2 beta - 1) rate factors; optional
  // because Adam renormalizes gradient scale anyway.
  const double critic_rate_factor =
      cfg.ntk_rate_factor ? std::pow(static_cast<double>(cfg.critic_width), 2.0 * cfg.beta - 1.0)
                          : 1.0;
  const double actor_rate_factor =
      cfg.ntk_rate_factor ? std::pow(static_cast<double>(cfg.actor_width), 2.0 * cfg.beta - 1.0)
                          : 1.0;

  Optimizer critic_opt(cfg.optimizer, res.critic_z.param_count(), cfg.adam);
  Optimizer actor_opt(cfg.optimizer, res.actor.param_count(), cfg.adam);

  // Last completed-cycle snapshot, reported when a later cycle diverges.
  ShallowNet good_actor = res.actor;
  ShallowNet good_critic = res.critic_z;

  const bool has_analytic = problem.has_analytic();
  const auto t0 = std::chrono::steady_clock::now();
  long global_step = 0;

  for (int cycle = 0; cycle < cfg.total_cycles; ++cycle) {
    const double lr_scale = scheduler_factor(cfg.scheduler, cycle);
    double critic_loss_sum = 0.0;
    double actor_loss_sum = 0.0;
    bool diverged = false;
    std::string reason;

    try {
      CriticNet critic = critic_for_problem(problem, res.critic_z);
      for (int s = 0; s < cfg.critic_steps_per_cycle && !diverged; ++s) {
        RngStream rng(derive_seed(cfg.seed, kCriticBatch, cycle, s));
        const RowMat batch = sample_interior(problem.domain, cfg.critic_batch, rng);
        double loss = 0.0;
        const VectorXd g =
            critic_gradient_batch(problem, critic, res.actor, critic_fam, batch, &loss);
        critic_loss_sum += loss;
        ++global_step;
        if (!std::isfinite(loss) || loss > cfg.divergence_threshold) {
          diverged = true;
          reason = "critic loss diverged";
          break;
        }
        critic_opt.step(res.critic_z.params(), g,
                        cfg.lr_critic * lr_scale * critic_rate_factor);
        critic = critic_for_problem(problem, res.critic_z);
      }
      for (int s = 0; s < cfg.actor_steps_per_cycle && !diverged; ++s) {
        RngStream rng(derive_seed(cfg.seed, kActorBatch, cycle, s));
        const RowMat batch = sample_interior(problem.domain, cfg.actor_batch, rng);
        double ham = 0.0;
        const VectorXd g = actor_gradient_batch(problem, critic, res.actor, actor_fam, batch,
                                                cfg.loss_floor, &ham);
        actor_loss_sum += ham;
        ++global_step;
        if (!std::isfinite(ham) || std::abs(ham) > cfg.divergence_threshold) {
          diverged = true;
          reason = "actor loss diverged";
          break;
        }
        actor_opt.step(res.actor.params(), g, cfg.lr_actor * lr_scale * actor_rate_factor);
      }
      if (!diverged && (!res.actor.finite() || !res.critic_z.finite())) {
        diverged = true;
        reason = "parameters became non-finite";
      }
    } catch (const NumericError& ex) {
      diverged = true;
      reason = ex.what();
    }

    if (diverged) {
      res.diverged = true;
      res.divergence_reason = reason;
      res.actor = good_actor;
      res.critic_z = good_critic;
      break;
    }

    MetricsRecord rec;
    rec.cycle = cycle;
    rec.step = global_step;
    rec.critic_loss = cfg.critic_steps_per_cycle > 0
                          ? critic_loss_sum / cfg.critic_steps_per_cycle
                          : 0.0;
    rec.actor_loss =
        cfg.actor_steps_per_cycle > 0 ? actor_loss_sum / cfg.actor_steps_per_cycle : 0.0;
    if (has_analytic) {
      RngStream eval_rng(derive_seed(cfg.seed, kEval, cycle));
      const CriticNet critic = critic_for_problem(problem, res.critic_z);
      const EvalMetrics em = evaluate(problem, res.actor, critic, cfg.eval_points, eval_rng);
      rec.mse_c = em.mse_c;
      rec.re_c = em.re_c;
      rec.mse_a = em.mse_a;
      rec.re_a = em.re_a;
    }
    if (record_wall_time) {
      rec.elapsed_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    res.history.push_back(rec);
    if (sink) sink(rec);

    good_actor = res.actor;
    good_critic = res.critic_z;
    res.cycles_run = cycle + 1;
  }

  return res;
}

}  // namespace hjbac
