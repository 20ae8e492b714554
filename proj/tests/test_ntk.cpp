#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "kernels.hpp"
#include "limit_ode.hpp"
#include "studies.hpp"
#include "support.hpp"

using namespace hjbac;
using testsupport::rel_err;

TEST_SUITE("kernels") {
  TEST_CASE("shared samples make the estimate exactly symmetric") {
    const double x[2] = {0.3, -0.4}, y[2] = {-0.1, 0.5};
    const auto axy = kernel_A_mc(x, y, {}, 5000, 77);
    const auto ayx = kernel_A_mc(y, x, {}, 5000, 77);
    CHECK(axy.mean == ayx.mean);
    CHECK(axy.std_error == ayx.std_error);
  }

  TEST_CASE("diagonal values are positive") {
    const double x[3] = {0.2, 0.1, -0.3};
    const auto a = kernel_A_mc(x, x, {}, 20000, 5);
    CHECK(a.mean > 3.0 * a.std_error);
  }

  TEST_CASE("empirical tangent kernel of a one-neuron network by hand") {
    ShallowNet net(1, 2, 1, 0.75);
    net.outer()(0, 0) = 0.6;
    net.inner()(0, 0) = 1.1;
    net.inner()(0, 1) = -0.4;
    net.bias()(0) = 0.25;
    const double x[2] = {0.3, 0.7}, y[2] = {-0.2, 0.1};
    const double tx = 1.1 * 0.3 - 0.4 * 0.7 + 0.25;
    const double ty = 1.1 * -0.2 - 0.4 * 0.1 + 0.25;
    const double sx = std::tanh(tx), sy = std::tanh(ty);
    const double want = sx * sy + 0.36 * (1 - sx * sx) * (1 - sy * sy) *
                                      (0.3 * -0.2 + 0.7 * 0.1 + 1.0);
    CHECK(rel_err(empirical_ntk(net, x, y), want) < 1e-14);
  }

  TEST_CASE("kernel matrices vanish on the boundary through eta") {
    const DomainSpec dom{DomainKind::ball, 1, 1.0};
    RowMat nodes(3, 1);
    nodes << -1.0, 0.0, 1.0;
    const KernelMatrices km = kernel_matrices(dom, nodes, 2000, 3);
    for (int g = 0; g < 3; ++g) {
      CHECK(km.B(0, g) == 0.0);
      CHECK(km.B(g, 2) == 0.0);
    }
    CHECK(km.B(1, 1) > 0.0);
    // symmetry by construction
    CHECK((km.A - km.A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("wide network matches the Monte Carlo kernel within 3 sigma") {
    const int d = 3;
    const double x[3] = {0.2, -0.3, 0.5}, y[3] = {0.1, 0.4, -0.2};
    const ShallowNet net = ShallowNet::init(100000, d, 1, 0.75, {.seed = 404});
    double net_se = 0.0;
    const double a_net = empirical_ntk(net, x, y, &net_se);
    const auto a_mc = kernel_A_mc(x, y, {}, 200000, 405);
    const double combined = std::hypot(net_se, a_mc.std_error);
    CHECK(std::abs(a_net - a_mc.mean) <= 3.0 * combined);
  }

  TEST_CASE("cached kernel matrices round-trip bit-exactly") {
    const DomainSpec dom{DomainKind::ball, 1, 1.0};
    RowMat nodes(9, 1);
    for (int i = 0; i < 9; ++i) nodes(i, 0) = -1.0 + 0.25 * i;
    const auto dir =
        (std::filesystem::temp_directory_path() / "hjbac_kcache").string();
    std::filesystem::remove_all(dir);
    const KernelMatrices fresh = kernel_matrices_cached(dom, nodes, 3000, 4, dir);
    const KernelMatrices cached = kernel_matrices_cached(dom, nodes, 3000, 4, dir);
    CHECK(fresh.A == cached.A);
    CHECK(fresh.B == cached.B);
    const KernelMatrices direct = kernel_matrices(dom, nodes, 3000, 4);
    CHECK(fresh.A == direct.A);
    // a different seed misses the cache entry
    const KernelMatrices other = kernel_matrices_cached(dom, nodes, 3000, 5, dir);
    CHECK(other.A != cached.A);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("variance over re-initializations decays like 1/width") {
    const auto s = ntk_variance_study({64, 256, 1024}, 120, 2, 0.75, 9);
    CHECK(s.slope == doctest::Approx(-1.0).epsilon(0.25));
  }
}

TEST_SUITE("limit_ode") {
  TEST_CASE("zero rates freeze the state") {
    const ProblemSpec p = preset("toy1d");
    LimitOdeConfig cfg;
    cfg.grid_n = 21;
    cfg.kernel_samples = 2000;
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;
    cfg.alpha = 0.0;
    cfg.omega = 0.0;
    const LimitOdeResult res = limit_ode_integrate(p, cfg);
    for (Eigen::Index g = 0; g < res.state.nodes.rows(); ++g) {
      CHECK(res.state.q(g) == p.gbar->value({res.state.nodes.data() + g, 1}));
      CHECK(res.state.u(g) == 0.0);
    }
  }

  TEST_CASE("grid derivatives are exact for quadratics") {
    const ProblemSpec p = preset("toy1d");
    LimitOdeConfig cfg;
    cfg.grid_n = 41;
    LimitOdeState st = limit_ode_initial_state(p, cfg);
    VectorXd vals(st.nodes.rows());
    for (Eigen::Index g = 0; g < st.nodes.rows(); ++g) {
      const double x = st.nodes(g, 0);
      vals(g) = 3.0 * x * x - 2.0 * x + 0.5;
    }
    RowMat d1, d2;
    grid_derivatives(st, cfg.grid_n, vals, d1, d2);
    for (Eigen::Index g = 0; g < st.nodes.rows(); ++g) {
      const double x = st.nodes(g, 0);
      CHECK(rel_err(d1(g, 0), 6.0 * x - 2.0, 1e-9) < 1e-9);
      CHECK(rel_err(d2(g, 0), 6.0, 1e-9) < 1e-9);
    }
  }

  TEST_CASE("the analytic pair is a fixed point of the discrete flow") {
    const ProblemSpec p = preset("toy1d");
    LimitOdeConfig cfg;
    cfg.grid_n = 41;
    cfg.kernel_samples = 20000;
    cfg.seed = 12;
    LimitOdeState st = limit_ode_initial_state(p, cfg);
    const KernelMatrices km = kernel_matrices(p.domain, st.nodes, cfg.kernel_samples, cfg.seed);
    std::vector<double> u(1);
    for (Eigen::Index g = 0; g < st.nodes.rows(); ++g) {
      const std::span<const double> x{st.nodes.data() + g, 1};
      st.q(g) = p.value_field->value(x);
      p.optimal_control(x, u);
      st.u(g) = u[0];
    }
    const auto tp = limit_ode_residuals(p, km, st);
    CHECK(tp.residual_critic <= 1e-12);
    CHECK(tp.residual_actor <= 1e-12);
  }

  TEST_CASE("boundary values never drift") {
    const ProblemSpec p = preset("toy1d");
    LimitOdeConfig cfg;
    cfg.grid_n = 31;
    cfg.kernel_samples = 5000;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.seed = 2;
    const LimitOdeResult res = limit_ode_integrate(p, cfg);
    const Eigen::Index last = res.state.nodes.rows() - 1;
    CHECK(std::abs(res.state.q(0) - 0.0) <= 1e-12);
    CHECK(std::abs(res.state.q(last) - 0.0) <= 1e-12);
  }

  TEST_CASE("2-d box integration runs and keeps the boundary") {
    const ProblemSpec p = preset("toy2d");
    LimitOdeConfig cfg;
    cfg.grid_n = 15;
    cfg.kernel_samples = 4000;
    cfg.dt = 1e-3;
    cfg.t_end = 0.2;
    cfg.seed = 6;
    const LimitOdeResult res = limit_ode_integrate(p, cfg);
    const int n = cfg.grid_n;
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(res.state.q(i)) <= 1e-12);                      // bottom row
      CHECK(std::abs(res.state.q(static_cast<Eigen::Index>(i) * n)) <= 1e-12);  // left col
    }
    CHECK(res.trace.back().residual_critic < res.trace.front().residual_critic);
  }

  TEST_CASE("unsupported configurations are rejected") {
    CHECK_THROWS_AS(limit_ode_integrate(preset("problem1"), LimitOdeConfig{}), ConfigError);
    LimitOdeConfig bad;
    bad.grid_n = 3;
    CHECK_THROWS_AS(limit_ode_integrate(preset("toy1d"), bad), ConfigError);
  }
}

TEST_SUITE("studies") {
  TEST_CASE("slope fit recovers an exact power law") {
    std::vector<double> x = {64, 128, 256, 512};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.62));
    CHECK(loglog_slope(x, y) == doctest::Approx(-0.62).epsilon(1e-12));
  }

  TEST_CASE("zero-step analyzed run does not move parameters") {
    const ProblemSpec p = preset("toy1d");
    RngStream rng(5);
    const RowMat quad = sample_interior(p.domain, 64, rng);
    const AnalyzedRun run = analyzed_regime_run(p, 32, 0.75, quad, 0, 0.01, 1.0, 1.0, 8);
    CHECK(run.actor.params() == run.actor0.params());
    CHECK(run.critic_z.params() == run.critic0.params());
  }

  TEST_CASE("single analyzed SGD iteration matches the explicit update") {
    const ProblemSpec p = preset("toy1d");
    RngStream rng(15);
    const RowMat quad = sample_interior(p.domain, 32, rng);
    const int width = 16;
    const double beta = 0.75, dt = 0.02;
    const AnalyzedRun run = analyzed_regime_run(p, width, beta, quad, 1, dt, 1.0, 1.0, 55);
    const TruncationFamily fam(width, beta);
    const double rate = std::pow(static_cast<double>(width), 2.0 * beta - 1.0);
    CriticNet critic = make_critic(run.critic0, p.domain, p.gbar);
    const VectorXd gq = critic_gradient_batch(p, critic, run.actor0, fam, quad);
    const VectorXd want_z = run.critic0.params() - dt * rate * gq;
    CHECK((run.critic_z.params() - want_z).cwiseAbs().maxCoeff() <= 1e-15);
    CriticNet critic1 = make_critic(run.critic_z, p.domain, p.gbar);
    const VectorXd gu =
        actor_gradient_batch(p, critic1, run.actor0, fam, quad, std::nullopt);
    const VectorXd want_a = run.actor0.params() - dt * rate * gu;
    CHECK((run.actor.params() - want_a).cwiseAbs().maxCoeff() <= 1e-15);
  }
}
