// Longer empirical invariants: near-stationarity of the analytic pair under
// training, width-consistency of analyzed-regime runs against the limit flow,
// and monotone parameter-drift decay. These run in minutes, not seconds.

#include <doctest.h>

#include <cmath>

#include "studies.hpp"
#include "support.hpp"
#include "trainer.hpp"

using namespace hjbac;

TEST_SUITE("slow_invariants") {
  TEST_CASE("training started at the fitted analytic pair stays put (problem2b)") {
    const ProblemSpec p = preset("problem2b");
    const ShallowNet actor0 = testsupport::fit_actor(p, 512, 4000, 0.75, 61, 1e-8);
    const ShallowNet critic0 = testsupport::fit_critic_z(p, 512, 4000, 0.75, 62, 1e-8);

    TrainConfig cfg;
    cfg.optimizer = OptimizerKind::sgd;
    cfg.lr_actor = 1e-3;
    cfg.lr_critic = 1e-3;
    cfg.total_cycles = 50;
    cfg.critic_batch = 256;
    cfg.actor_batch = 256;
    cfg.eval_points = 4096;
    cfg.seed = 63;

    // metrics of the fitted pair before any training
    RngStream eval_rng(derive_seed(cfg.seed, train_streams::kEval, 0));
    const CriticNet cnet = critic_for_problem(p, critic0);
    const EvalMetrics m0 = evaluate(p, actor0, cnet, cfg.eval_points, eval_rng);
    CAPTURE(m0.mse_c);
    CAPTURE(m0.mse_a);

    double worst_ratio = 0.0;
    const TrainResult res = train(
        p, cfg,
        [&](const MetricsRecord& r) {
          worst_ratio = std::max({worst_ratio, r.mse_c / m0.mse_c, r.re_c / m0.re_c,
                                  r.mse_a / m0.mse_a, r.re_a / m0.re_a});
        },
        true, &actor0, &critic0);
    CHECK_FALSE(res.diverged);
    CHECK(worst_ratio <= 2.0);
  }

  TEST_CASE("width consistency against the limit flow (toy1d)") {
    LimitOdeConfig ode;
    ode.grid_n = 65;
    ode.kernel_samples = 100000;
    ode.dt = 1e-3;
    ode.seed = 71;
    const auto s = width_consistency_study(preset("toy1d"), {64, 512, 4096}, 2, 5.0, 0.01,
                                           0.75, ode, 72);
    REQUIRE(s.rows.size() == 3);
    // identical seeds and widths give identical distances
    const auto s2 = width_consistency_study(preset("toy1d"), {64, 512, 4096}, 2, 5.0, 0.01,
                                            0.75, ode, 72);
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      CHECK(s.rows[i].dist_tend == s2.rows[i].dist_tend);
    }
    // distances at the final time shrink with width (one inversion allowed)
    int inversions = 0;
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      if (s.rows[i].dist_tend >= s.rows[i - 1].dist_tend) ++inversions;
    }
    CHECK(inversions <= 1);
    CHECK(s.rows.back().dist_tend < s.rows.front().dist_tend);
    // initialization-noise slope near 1/2 - beta
    CHECK(std::abs(s.init_slope - (-0.25)) <= 0.25);
    // the H2-style proxy is also finite and shrinking overall
    CHECK(s.rows.back().dist_q_h2 < s.rows.front().dist_q_h2);
  }

  TEST_CASE("parameter drift shrinks with width (problem1 d=2)") {
    const auto s =
        param_drift_study(preset("problem1", 2), {128, 256, 512, 1024}, 3, 200, 0.01, 0.75,
                          256, 73);
    REQUIRE(s.rows.size() == 4);
    // overall decay per class, with at most one adjacent inversion allowed
    // (three seeds leave a little noise between neighboring widths)
    const auto check_class = [&](auto member) {
      CHECK(s.rows.back().*member < s.rows.front().*member);
      int inversions = 0;
      for (std::size_t i = 1; i < s.rows.size(); ++i) {
        if (s.rows[i].*member >= s.rows[i - 1].*member) ++inversions;
      }
      CHECK(inversions <= 1);
    };
    check_class(&DriftRow::actor_outer);
    check_class(&DriftRow::actor_inner);
    check_class(&DriftRow::actor_bias);
    check_class(&DriftRow::critic_outer);
    check_class(&DriftRow::critic_inner);
    check_class(&DriftRow::critic_bias);
    CHECK(s.max_slope <= (0.05 + 0.75 - 1.0) + 0.15);
    // zero iterations produce zero drift
    const auto z = param_drift_study(preset("problem1", 2), {128}, 1, 0, 0.01, 0.75, 64, 74);
    CHECK(z.rows[0].actor_outer == 0.0);
    CHECK(z.rows[0].critic_bias == 0.0);
  }
}
