#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "truncation.hpp"

using namespace hjbac;
using testsupport::rel_err;

TEST_SUITE("critic") {
  TEST_CASE("boundary values are exact for arbitrary parameters") {
    const DomainSpec dom{DomainKind::box, 3, 1.0};
    auto gbar = std::make_shared<ConstantField>(3, 2.5);
    RngStream rng(4);
    for (int rep = 0; rep < 5; ++rep) {
      auto z = ShallowNet::init(16, 3, 1, 0.75, {.seed = static_cast<uint64_t>(rep)});
      z.params() *= 50.0;  // wild parameters
      const CriticNet critic = make_critic(std::move(z), dom, gbar);
      const RowMat bp = sample_boundary(dom, 200, rng);
      for (int r = 0; r < bp.rows(); ++r) {
        const std::span<const double> x{bp.data() + r * 3, 3};
        CHECK(critic.value(x) == 2.5);  // box eta is exactly zero on faces
      }
    }
  }

  TEST_CASE("zero inner network reproduces gbar everywhere") {
    const DomainSpec dom{DomainKind::ball, 2, 1.0};
    auto gbar = std::make_shared<ConstantField>(2, -0.75);
    ShallowNet z(8, 2, 1, 0.75);
    const CriticNet critic = make_critic(std::move(z), dom, gbar);
    RngStream rng(9);
    const RowMat pts = sample_interior(dom, 50, rng);
    for (int r = 0; r < 50; ++r) {
      CHECK(critic.value({pts.data() + r * 2, 2}) == -0.75);
    }
  }

  TEST_CASE("constant Z gives k0 (1 - |x|^2) on the unit ball") {
    const DomainSpec dom{DomainKind::ball, 3, 1.0};
    const double k0 = 1.7;
    const CriticNet critic =
        make_critic(testsupport::constant_net(3, 1, k0), dom,
                    std::make_shared<ConstantField>(3, 0.0));
    RngStream rng(13);
    const RowMat pts = sample_interior(dom, 100, rng);
    for (int r = 0; r < 100; ++r) {
      const std::span<const double> x{pts.data() + r * 3, 3};
      const double want = k0 * (1.0 - as_vec(x).squaredNorm());
      CHECK(rel_err(critic.value(x), want, 1e-10) < 1e-12);
    }
  }

  TEST_CASE("gradient of Z=0, gbar=x1^2 is (2 x1, 0, ...)") {
    const int d = 3;
    const DomainSpec dom{DomainKind::ball, d, 2.0};
    auto gbar = std::make_shared<CallbackField>(
        d, [](std::span<const double> x) { return x[0] * x[0]; },
        [d](std::span<const double> x, std::span<double> out) {
          for (int i = 0; i < d; ++i) out[i] = 0.0;
          out[0] = 2.0 * x[0];
        },
        [d](std::span<const double>, std::span<double> out) {
          for (int i = 0; i < d * d; ++i) out[i] = 0.0;
          out[0] = 2.0;
        });
    const CriticNet critic = make_critic(ShallowNet(4, d, 1, 0.75), dom, gbar);
    const double x[3] = {0.7, -0.3, 0.2};
    const auto ev = critic_point_eval(critic, x);
    CHECK(ev.grad(0) == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(ev.grad(1) == 0.0);
    CHECK(ev.grad(2) == 0.0);
    const double e1[3] = {1.0, 0.0, 0.0};
    const double zero[3] = {0.0, 0.0, 0.0};
    CHECK(ev.dir2(e1, zero) == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("derivatives match finite differences at random points") {
    RngStream rng(31);
    for (const auto kind : {DomainKind::ball, DomainKind::box}) {
      const DomainSpec dom{kind, 4, 1.0};
      auto gbar = std::make_shared<ConstantField>(4, 0.3);
      const CriticNet critic =
          make_critic(ShallowNet::init(24, 4, 1, 0.7, {.seed = 55}), dom, gbar);
      for (int rep = 0; rep < 25; ++rep) {
        const RowMat pt = sample_interior(dom, 1, rng);
        const std::span<const double> x{pt.data(), 4};
        const auto ev = critic_point_eval(critic, x);
        std::vector<double> fd(4);
        for (int i = 0; i < 4; ++i) {
          fd[i] = testsupport::central_diff(
              [&](double h) {
                std::vector<double> q(x.begin(), x.end());
                q[i] += h;
                return critic.value(q);
              },
              1e-5);
        }
        CHECK(testsupport::vector_rel_err({ev.grad.data(), 4}, fd, 1e-6) < 1e-6);
        // dir2 against the second derivative of h -> Q(x + h a + h^2 s)
        std::vector<double> a(4), s(4);
        for (int i = 0; i < 4; ++i) {
          a[i] = rng.normal();
          s[i] = rng.normal();
        }
        const double h = 1e-4;
        auto q_at = [&](double hh) {
          std::vector<double> q(x.begin(), x.end());
          for (int i = 0; i < 4; ++i) q[i] += hh * a[i] + hh * hh * s[i];
          return critic.value(q);
        };
        const double fd2 = (q_at(h) - 2.0 * q_at(0.0) + q_at(-h)) / (h * h);
        CHECK(rel_err(ev.dir2(a, s), fd2, 1e-7) < 1e-5);
      }
    }
  }
}

TEST_SUITE("truncation") {
  TEST_CASE("identity region and identity mode") {
    const TruncationFamily fam(512, 0.75);
    const double s = fam.threshold();
    CHECK(s == doctest::Approx(std::pow(512.0, 0.05)).epsilon(1e-15));
    for (double x : {0.0, 0.5, -0.99 * s, 0.99 * s}) {
      const auto e = fam(x);
      CHECK(e.psi == x);
      CHECK(e.psi_prime == 1.0);
      CHECK(e.F == x);
    }
    const auto id = TruncationFamily::identity();
    const auto e = id(123.0);
    CHECK(e.psi == 123.0);
    CHECK(e.psi_prime == 1.0);
    CHECK(e.F == 123.0);
  }

  TEST_CASE("tail limit matches quadrature of the slope") {
    const TruncationFamily fam(100, 0.75);
    const double s = fam.threshold();
    // numeric quadrature of the gaussian-tailed slope from s to s + 12
    const int n = 400000;
    const double width = 12.0;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = (i + 0.5) * width / n;
      integral += std::exp(-y * y) * width / n;
    }
    const double want = s + integral;
    CHECK(rel_err(fam(1e9).psi, want) < 1e-6);
    CHECK(fam(1e9).psi_prime == doctest::Approx(0.0));
  }

  TEST_CASE("odd symmetry") {
    const TruncationFamily fam(37, 0.8);
    RngStream rng(2);
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(-20.0, 20.0);
      CHECK(fam(-x).psi == doctest::Approx(-fam(x).psi).epsilon(1e-15));
    }
  }

  TEST_CASE("definition bullets hold on a dense grid") {
    for (const int N : {10, 1000}) {
      const TruncationFamily fam(N, 0.75);
      const double s = fam.threshold();
      double prev = -1e300;
      double max_f_slope = 0.0;
      double prev_f = 0.0, prev_x = 0.0;
      bool first = true;
      for (int i = 0; i <= 20000; ++i) {
        const double x = -10.0 + 20.0 * i / 20000.0;
        const auto e = fam(x);
        CHECK(e.psi >= prev);  // increasing
        prev = e.psi;
        CHECK(std::abs(e.psi) <= 2.0 * s);
        CHECK(std::abs(e.psi_prime) <= 1.0);
        CHECK(std::abs(e.psi - x) <= std::abs(x) * (std::abs(x) >= s ? 1.0 : 0.0));
        if (!first) max_f_slope = std::max(max_f_slope, std::abs(e.F - prev_f) / (x - prev_x));
        prev_f = e.F;
        prev_x = x;
        first = false;
      }
      CHECK(max_f_slope <= 4.0);  // empirical Lipschitz bound for these N
    }
  }

  TEST_CASE("invalid delta is rejected") {
    CHECK_THROWS_AS(TruncationFamily(10, 0.75, 0.3), ConfigError);
    CHECK_THROWS_AS(TruncationFamily(10, 0.75, 0.0), ConfigError);
  }
}
