#include "mc_value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "math_util.hpp"
#include "parallel.hpp"

namespace hjbac {

namespace {

constexpr std::uint64_t kPathStream = 11;
constexpr std::uint64_t kPointStream = 12;

}  // namespace

namespace mc_detail {

double crossing_theta(const DomainSpec& dom, std::span<const double> x,
                      std::span<const double> step) {
  const int d = dom.dim;
  if (dom.kind == DomainKind::ball) {
    double xx = 0.0, xd = 0.0, dd = 0.0;
    for (int i = 0; i < d; ++i) {
      xx += x[i] * x[i];
      xd += x[i] * step[i];
      dd += step[i] * step[i];
    }
    const double R2 = dom.radius * dom.radius;
    if (dd <= 0.0) return 1.0;
    const double disc = xd * xd + dd * (R2 - xx);
    const double theta = (-xd + std::sqrt(std::max(disc, 0.0))) / dd;
    return std::clamp(theta, 0.0, 1.0);
  }
  double theta = 1.0;
  for (int i = 0; i < d; ++i) {
    const double xi = x[i] + step[i];
    if (std::abs(xi) >= dom.radius && step[i] != 0.0) {
      const double target = step[i] > 0.0 ? dom.radius : -dom.radius;
      theta = std::min(theta, (target - x[i]) / step[i]);
    }
  }
  return std::clamp(theta, 0.0, 1.0);
}

void snap_to_boundary(const DomainSpec& dom, std::span<double> x);

bool apply_crossing(const DomainSpec& dom, std::span<const double> x,
                    std::span<const double> step, std::span<double> out) {
  const int d = dom.dim;
  for (int i = 0; i < d; ++i) out[i] = x[i] + step[i];
  if (dom.contains({out.data(), static_cast<std::size_t>(d)})) return false;
  const double theta = crossing_theta(dom, x, step);
  for (int i = 0; i < d; ++i) out[i] = x[i] + theta * step[i];
  snap_to_boundary(dom, out);
  return true;
}

void snap_to_boundary(const DomainSpec& dom, std::span<double> x) {
  if (dom.kind == DomainKind::box) {
    // set the coordinate that crossed exactly onto the face
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < dom.dim; ++i) {
      const double v = std::abs(x[i]);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    x[arg] = x[arg] > 0.0 ? dom.radius : -dom.radius;
  }
}

}  // namespace mc_detail

namespace {
using mc_detail::crossing_theta;
using mc_detail::snap_to_boundary;
}  // namespace

void McConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("mc dt must be positive");
  if (paths_per_point < 1) throw ConfigError("paths_per_point must be >= 1");
  if (eval_points < 1) throw ConfigError("eval_points must be >= 1");
  if (!(max_time > 0.0)) throw ConfigError("max_time must be positive");
}

PathEstimate simulate_value(const ProblemSpec& problem, const ShallowNet& actor,
                            std::span<const double> x, const McConfig& cfg,
                            std::uint64_t point_tag) {
  cfg.validate();
  const int d = problem.domain.dim;
  const int k = problem.action_dim;
  const int dp = problem.noise_dim;
  if (actor.input_dim() != d || actor.output_dim() != k) {
    throw ConfigError("actor network does not match the problem dimensions");
  }
  if (!problem.domain.contains(x)) throw ConfigError("simulation start must be interior");

  const int paths = cfg.paths_per_point;
  const double sqdt = std::sqrt(cfg.dt);
  const long max_steps = static_cast<long>(std::ceil(cfg.max_time / cfg.dt));

  std::vector<RngStream> streams;
  streams.reserve(paths);
  for (int p = 0; p < paths; ++p) {
    streams.emplace_back(derive_seed(cfg.seed, kPathStream, point_tag, p));
  }

  RowMat state(paths, d);
  for (int p = 0; p < paths; ++p) {
    for (int i = 0; i < d; ++i) state(p, i) = x[i];
  }
  std::vector<double> cost(paths, 0.0), exit_time(paths, cfg.max_time);
  std::vector<char> alive(paths, 1), censored(paths, 0);
  int n_alive = paths;

  // per-step scratch
  RowMat xc, acts, ta, s0;
  std::vector<int> idx(paths);
  std::vector<double> b(d), diag(d), col(d), step(d), xi(dp), xpt(d);

  double t = 0.0;
  for (long n = 0; n < max_steps && n_alive > 0; ++n) {
    // compact alive paths and evaluate the actor in one batch
    int na = 0;
    for (int p = 0; p < paths; ++p) {
      if (alive[p]) idx[na++] = p;
    }
    xc.resize(na, d);
    for (int r = 0; r < na; ++r) xc.row(r) = state.row(idx[r]);
    ta.resize(na, actor.width());
    ta.noalias() = xc * actor.inner().transpose();
    ta.rowwise() += actor.bias().transpose();
    tanh_into(ta, s0);
    acts.resize(na, k);
    acts.noalias() = actor.output_scale() * (s0 * actor.outer().transpose());
    const double disc = std::exp(-problem.gamma * t);

    for (int r = 0; r < na; ++r) {
      const int p = idx[r];
      std::span<double> a{acts.data() + static_cast<Eigen::Index>(r) * k,
                          static_cast<std::size_t>(k)};
      problem.clamp_action(a);
      for (int i = 0; i < d; ++i) xpt[i] = xc(r, i);
      const std::span<const double> xs{xpt.data(), static_cast<std::size_t>(d)};
      problem.drift(xs, a, b);
      const double c = problem.running_cost(xs, a);
      for (int j = 0; j < dp; ++j) xi[j] = streams[p].normal();
      if (problem.diffusion_form == DiffusionForm::diagonal) {
        problem.diffusion_diag(xs, a, diag);
        for (int i = 0; i < d; ++i) step[i] = b[i] * cfg.dt + sqdt * diag[i] * xi[i];
      } else {
        for (int i = 0; i < d; ++i) step[i] = b[i] * cfg.dt;
        for (int j = 0; j < dp; ++j) {
          problem.diffusion_column(xs, a, j, col);
          for (int i = 0; i < d; ++i) step[i] += sqdt * col[i] * xi[j];
        }
      }
      bool finite = std::isfinite(c);
      for (int i = 0; i < d && finite; ++i) finite = std::isfinite(step[i]);
      if (!finite) throw NumericError("coefficient evaluation failed along a path");

      for (int i = 0; i < d; ++i) xpt[i] += step[i];
      if (!problem.domain.contains({xpt.data(), static_cast<std::size_t>(d)})) {
        for (int i = 0; i < d; ++i) xpt[i] = xc(r, i);
        const double theta = crossing_theta(problem.domain, xs, step);
        for (int i = 0; i < d; ++i) xpt[i] += theta * step[i];
        snap_to_boundary(problem.domain, xpt);
        const double tau = t + theta * cfg.dt;
        cost[p] += disc * c * theta * cfg.dt +
                   std::exp(-problem.gamma * tau) *
                       problem.gbar->value({xpt.data(), static_cast<std::size_t>(d)});
        exit_time[p] = tau;
        alive[p] = 0;
        --n_alive;
        continue;
      }
      cost[p] += disc * c * cfg.dt;
      for (int i = 0; i < d; ++i) state(p, i) = xpt[i];
    }
    t += cfg.dt;
  }

  // censor survivors at the horizon with the interpolated boundary value
  for (int p = 0; p < paths; ++p) {
    if (!alive[p]) continue;
    censored[p] = 1;
    const std::span<const double> xs{state.data() + static_cast<Eigen::Index>(p) * d,
                                     static_cast<std::size_t>(d)};
    cost[p] += std::exp(-problem.gamma * cfg.max_time) * problem.gbar->value(xs);
    exit_time[p] = cfg.max_time;
  }

  PathEstimate est;
  double sum = 0.0, sum_tau = 0.0;
  long n_cens = 0;
  for (int p = 0; p < paths; ++p) {
    sum += cost[p];
    sum_tau += exit_time[p];
    n_cens += censored[p];
  }
  est.mean_cost = sum / paths;
  est.mean_exit_time = sum_tau / paths;
  est.censored_fraction = static_cast<double>(n_cens) / paths;
  if (paths > 1) {
    double ss = 0.0;
    for (int p = 0; p < paths; ++p) {
      const double dlt = cost[p] - est.mean_cost;
      ss += dlt * dlt;
    }
    est.std_error = std::sqrt(ss / (paths - 1) / paths);
  } else {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

AgreementReport agreement_report(const ProblemSpec& problem, const ShallowNet& actor,
                                 const CriticNet& critic, const McConfig& cfg) {
  cfg.validate();
  if (!problem.value_field) {
    throw ConfigError("agreement report requires the analytic value function");
  }
  const int d = problem.domain.dim;
  RngStream point_rng(derive_seed(cfg.seed, kPointStream));
  const RowMat points = sample_interior(problem.domain, cfg.eval_points, point_rng);

  AgreementReport rep;
  rep.rows.resize(cfg.eval_points);

  parallel_chunks(cfg.eval_points, 8, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const std::span<const double> x{points.data() + static_cast<Eigen::Index>(p) * d,
                                      static_cast<std::size_t>(d)};
      AgreementRow row;
      row.x = as_vec(x);
      row.value = problem.value_field->value(x);
      row.critic = critic.value(x);
      const PathEstimate pe = simulate_value(problem, actor, x, cfg, p);
      row.mc = pe.mean_cost;
      row.std_error = pe.std_error;
      row.exit_mean = pe.mean_exit_time;
      row.censored_fraction = pe.censored_fraction;
      rep.rows[p] = std::move(row);
    }
  });

  const auto mean_sq = [&](auto&& f) {
    double s = 0.0;
    for (const auto& r : rep.rows) {
      const double v = f(r);
      s += v * v;
    }
    return s / rep.rows.size();
  };
  rep.e1 = mean_sq([](const AgreementRow& r) { return r.value - r.mc; });
  rep.e2 = mean_sq([](const AgreementRow& r) { return r.value - r.critic; });
  rep.e3 = mean_sq([](const AgreementRow& r) { return r.critic - r.mc; });

  const auto histogram = [&](const std::string& name, auto&& f) {
    HistogramSpec h;
    h.name = name;
    constexpr int bins = 50;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : rep.rows) {
      const double v = f(r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo + 1e-12;
    const double w = (hi - lo) / bins;
    h.bin_left.resize(bins);
    h.bin_right.resize(bins);
    h.count.assign(bins, 0);
    for (int i = 0; i < bins; ++i) {
      h.bin_left[i] = lo + i * w;
      h.bin_right[i] = lo + (i + 1) * w;
    }
    for (const auto& r : rep.rows) {
      int i = static_cast<int>((f(r) - lo) / w);
      i = std::clamp(i, 0, bins - 1);
      ++h.count[i];
    }
    return h;
  };
  rep.histograms.push_back(
      histogram("v_minus_mc", [](const AgreementRow& r) { return r.value - r.mc; }));
  rep.histograms.push_back(
      histogram("v_minus_critic", [](const AgreementRow& r) { return r.value - r.critic; }));
  rep.histograms.push_back(
      histogram("critic_minus_mc", [](const AgreementRow& r) { return r.critic - r.mc; }));
  return rep;
}

}  // namespace hjbac
