// Command-line driver for the hjbac shared library. Subcommands mirror the
// library's coarse operations: train, verify-mc, study, catalog. All options
// resolve into a flat JSON config that is echoed into the run manifest, and
// re-running with --config <manifest.json> replays a run.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hjbac/hjbac.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open config file " << path << "\n";
    std::exit(kExitUsage);
  }
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    std::cerr << "error: bad config file: " << e.what() << "\n";
    std::exit(kExitUsage);
  }
  // A manifest replays the run it describes; its embedded config already
  // carries every resolved option. Replays run with timing off so repeated
  // replays produce byte-identical outputs.
  if (j.contains("command") && j.contains("config")) {
    json cfg = j["config"];
    cfg["timing"] = "off";
    return cfg;
  }
  return j;
}

int fail_with_catalog(const std::string& name) {
  std::cerr << "error: unknown problem '" << name << "'; known problems:\n"
            << hjbac_catalog();
  return kExitUsage;
}

struct ProblemHandle {
  hjbac_problem* p = nullptr;
  ~ProblemHandle() { hjbac_problem_destroy(p); }
};

struct NetHandle {
  hjbac_net* n = nullptr;
  ~NetHandle() { hjbac_net_destroy(n); }
};

int open_problem(const std::string& name, int dim, ProblemHandle& h) {
  const hjbac_status st = hjbac_problem_create(name.c_str(), dim, &h.p);
  if (st == HJBAC_ERR_UNKNOWN_NAME) return fail_with_catalog(name);
  if (st != HJBAC_OK) {
    std::cerr << "error: " << hjbac_last_error() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hjbac: neural actor-critic solver for stationary HJB equations"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0 = auto / HJBAC_THREADS); 1 gives bit-exact replay");

  // ---- train ----
  auto* tr = app.add_subcommand("train", "train an actor-critic pair on a named problem");
  std::string tr_problem, tr_out = "run", tr_config;
  int tr_dim = 0;
  std::optional<std::uint64_t> tr_seed;
  std::optional<int> tr_width, tr_critic_width, tr_cycles, tr_critic_steps, tr_actor_steps,
      tr_batch_critic, tr_batch_actor, tr_eval_points;
  std::optional<double> tr_beta, tr_lr_actor, tr_lr_critic, tr_loss_floor, tr_trunc_delta;
  std::optional<std::string> tr_optimizer, tr_scheduler, tr_truncation, tr_timing;
  bool tr_rate_factor = false;
  tr->add_option("--problem", tr_problem, "problem name (or from a replayed manifest)");
  tr->add_option("--dim", tr_dim, "dimension override (lqr, problem1)");
  tr->add_option("--config", tr_config, "JSON config or manifest to replay");
  tr->add_option("--out", tr_out, "output directory");
  tr->add_option("--seed", tr_seed, "master seed");
  tr->add_option("--width", tr_width, "hidden width for both networks");
  tr->add_option("--critic-width", tr_critic_width, "critic hidden width override");
  tr->add_option("--beta", tr_beta, "output scaling exponent in (0.5, 1)");
  tr->add_option("--cycles", tr_cycles, "training cycles");
  tr->add_option("--critic-steps", tr_critic_steps, "critic steps per cycle");
  tr->add_option("--actor-steps", tr_actor_steps, "actor steps per cycle");
  tr->add_option("--batch-critic", tr_batch_critic, "critic batch size");
  tr->add_option("--batch-actor", tr_batch_actor, "actor batch size");
  tr->add_option("--lr-actor", tr_lr_actor, "actor base learning rate");
  tr->add_option("--lr-critic", tr_lr_critic, "critic base learning rate");
  tr->add_option("--optimizer", tr_optimizer, "adam | sgd");
  tr->add_option("--scheduler", tr_scheduler, "constant | inverse_cycle");
  tr->add_option("--truncation", tr_truncation, "identity | smooth");
  tr->add_option("--truncation-delta", tr_trunc_delta, "smooth clipping exponent");
  tr->add_option("--loss-floor", tr_loss_floor, "actor loss floor (modified loss)");
  tr->add_flag("--ntk-rate-factor", tr_rate_factor, "apply width^(2b-1) rate factors");
  tr->add_option("--eval-points", tr_eval_points, "per-cycle metric sample count");
  tr->add_option("--timing", tr_timing, "wall | off (off gives byte-stable metrics)");

  // ---- verify-mc ----
  auto* vm = app.add_subcommand("verify-mc",
                                "Euler-Maruyama actor-critic agreement report (E1/E2/E3)");
  std::string vm_problem, vm_actor, vm_critic, vm_out = "verify";
  int vm_dim = 0;
  std::optional<int> vm_points, vm_paths;
  std::optional<double> vm_dt, vm_max_time;
  std::optional<std::uint64_t> vm_seed;
  vm->add_option("--problem", vm_problem, "problem name")->required();
  vm->add_option("--dim", vm_dim, "dimension override");
  vm->add_option("--actor-ckpt", vm_actor, "actor checkpoint")->required();
  vm->add_option("--critic-ckpt", vm_critic, "critic checkpoint")->required();
  vm->add_option("--points", vm_points, "evaluation points");
  vm->add_option("--paths", vm_paths, "sample paths per point");
  vm->add_option("--dt", vm_dt, "Euler-Maruyama time step");
  vm->add_option("--max-time", vm_max_time, "horizon cap");
  vm->add_option("--seed", vm_seed, "seed");
  vm->add_option("--out", vm_out, "output directory");

  // ---- study ----
  auto* st = app.add_subcommand("study", "NTK limit-theory studies");
  std::string st_name, st_out = "study", st_problem, st_widths;
  std::optional<int> st_dim, st_reinits, st_seeds, st_grid, st_iterations;
  std::optional<double> st_T, st_dt, st_beta, st_alpha, st_omega, st_dt_train;
  std::optional<long> st_kernel_samples;
  std::optional<std::uint64_t> st_seed;
  std::string st_kernel_cache;
  st->add_option("name", st_name,
                 "ntk-variance | init-error | param-drift | limit-ode | width-consistency")
      ->required();
  st->add_option("--problem", st_problem, "problem name where applicable");
  st->add_option("--dim", st_dim, "dimension override");
  st->add_option("--widths", st_widths, "comma-separated widths, e.g. 64,256,1024");
  st->add_option("--reinits", st_reinits, "re-initializations (ntk-variance)");
  st->add_option("--seeds", st_seeds, "seeds per width");
  st->add_option("--grid", st_grid, "grid nodes per dimension");
  st->add_option("--kernel-samples", st_kernel_samples, "kernel MC sample count");
  st->add_option("--kernel-cache", st_kernel_cache, "directory for cached kernel matrices");
  st->add_option("--iterations", st_iterations, "training iterations (param-drift)");
  st->add_option("--T", st_T, "final time");
  st->add_option("--dt", st_dt, "ODE time step");
  st->add_option("--dt-train", st_dt_train, "training time step");
  st->add_option("--alpha", st_alpha, "actor rate");
  st->add_option("--omega", st_omega, "critic rate");
  st->add_option("--beta", st_beta, "output scaling exponent");
  st->add_option("--seed", st_seed, "seed");
  st->add_option("--out", st_out, "output directory");

  // ---- catalog ----
  auto* cat = app.add_subcommand("catalog", "list known problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  hjbac_set_threads(threads);

  if (cat->parsed()) {
    std::cout << hjbac_catalog();
    return kExitOk;
  }

  if (tr->parsed()) {
    json cfg = tr_config.empty() ? json::object() : load_config_file(tr_config);
    const auto set = [&](const char* key, const auto& opt) {
      if (opt) cfg[key] = *opt;
    };
    set("seed", tr_seed);
    if (tr_width) {
      cfg["actor_width"] = *tr_width;
      cfg["critic_width"] = *tr_width;
    }
    set("critic_width", tr_critic_width);
    set("beta", tr_beta);
    set("total_cycles", tr_cycles);
    set("critic_steps_per_cycle", tr_critic_steps);
    set("actor_steps_per_cycle", tr_actor_steps);
    set("critic_batch", tr_batch_critic);
    set("actor_batch", tr_batch_actor);
    set("lr_actor", tr_lr_actor);
    set("lr_critic", tr_lr_critic);
    set("optimizer", tr_optimizer);
    set("scheduler", tr_scheduler);
    set("truncation", tr_truncation);
    set("truncation_delta", tr_trunc_delta);
    set("loss_floor", tr_loss_floor);
    set("eval_points", tr_eval_points);
    set("timing", tr_timing);
    if (tr_rate_factor) cfg["ntk_rate_factor"] = true;

    ProblemHandle prob;
    // a replayed manifest may carry the problem and dimension
    std::string pname = tr_problem;
    int pdim = tr_dim;
    if (pname.empty() && cfg.contains("problem")) pname = cfg["problem"];
    if (pdim == 0 && cfg.contains("dim")) pdim = cfg["dim"];
    cfg.erase("problem");
    cfg.erase("dim");
    if (pname.empty()) {
      std::cerr << "error: --problem is required (or replay a manifest via --config)\n";
      return kExitUsage;
    }
    if (const int rc = open_problem(pname, pdim, prob); rc != kExitOk) return rc;

    hjbac_train_summary summary{};
    const hjbac_status rc =
        hjbac_train(prob.p, cfg.dump().c_str(), tr_out.c_str(), &summary);
    if (rc == HJBAC_OK || rc == HJBAC_ERR_DIVERGED) {
      std::printf("cycles run: %d%s\n", summary.cycles_run,
                  summary.diverged ? " (diverged; last good checkpoint written)" : "");
      if (hjbac_problem_has_analytic(prob.p) && summary.cycles_run > 0) {
        std::printf("final      mse_c=%.6g re_c=%.6g mse_a=%.6g re_a=%.6g\n",
                    summary.final_mse_critic, summary.final_re_critic,
                    summary.final_mse_actor, summary.final_re_actor);
        std::printf("last 10%%   mse_c=%.6g re_c=%.6g mse_a=%.6g re_a=%.6g\n",
                    summary.window_mse_critic, summary.window_re_critic,
                    summary.window_mse_actor, summary.window_re_actor);
      }
      return rc == HJBAC_OK ? kExitOk : kExitDiverged;
    }
    std::cerr << "error: " << hjbac_last_error() << "\n";
    return kExitUsage;
  }

  if (vm->parsed()) {
    ProblemHandle prob;
    if (const int rc = open_problem(vm_problem, vm_dim, prob); rc != kExitOk) return rc;
    NetHandle actor, critic;
    if (hjbac_net_load(vm_actor.c_str(), &actor.n) != HJBAC_OK) {
      std::cerr << "error: " << hjbac_last_error() << "\n";
      return kExitUsage;
    }
    if (hjbac_net_load(vm_critic.c_str(), &critic.n) != HJBAC_OK) {
      std::cerr << "error: " << hjbac_last_error() << "\n";
      return kExitUsage;
    }
    json cfg = json::object();
    if (vm_points) cfg["eval_points"] = *vm_points;
    if (vm_paths) cfg["paths_per_point"] = *vm_paths;
    if (vm_dt) cfg["dt"] = *vm_dt;
    if (vm_max_time) cfg["max_time"] = *vm_max_time;
    if (vm_seed) cfg["seed"] = *vm_seed;
    double e[3] = {0, 0, 0};
    const hjbac_status rc =
        hjbac_verify_mc(prob.p, actor.n, critic.n, cfg.dump().c_str(), vm_out.c_str(), e);
    if (rc != HJBAC_OK) {
      std::cerr << "error: " << hjbac_last_error() << "\n";
      return kExitUsage;
    }
    std::printf("E1 (true vs MC)     = %.6g\n", e[0]);
    std::printf("E2 (true vs critic) = %.6g\n", e[1]);
    std::printf("E3 (critic vs MC)   = %.6g\n", e[2]);
    return kExitOk;
  }

  if (st->parsed()) {
    json cfg = json::object();
    if (!st_problem.empty()) cfg["problem"] = st_problem;
    if (st_dim) cfg["dim"] = *st_dim;
    if (!st_widths.empty()) {
      json arr = json::array();
      std::size_t pos = 0;
      while (pos < st_widths.size()) {
        const std::size_t comma = st_widths.find(',', pos);
        const std::string tok = st_widths.substr(pos, comma - pos);
        arr.push_back(std::atoi(tok.c_str()));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      cfg["widths"] = arr;
    }
    if (st_reinits) cfg["reinits"] = *st_reinits;
    if (st_seeds) cfg["seeds"] = *st_seeds;
    if (st_grid) cfg["grid_n"] = *st_grid;
    if (st_kernel_samples) cfg["kernel_samples"] = *st_kernel_samples;
    if (!st_kernel_cache.empty()) cfg["kernel_cache"] = st_kernel_cache;
    if (st_iterations) cfg["iterations"] = *st_iterations;
    if (st_T) cfg["T"] = *st_T;
    if (st_dt) cfg["dt"] = *st_dt;
    if (st_dt_train) cfg["dt_train"] = *st_dt_train;
    if (st_alpha) cfg["alpha"] = *st_alpha;
    if (st_omega) cfg["omega"] = *st_omega;
    if (st_beta) cfg["beta"] = *st_beta;
    if (st_seed) cfg["seed"] = *st_seed;
    const hjbac_status rc = hjbac_study(st_name.c_str(), cfg.dump().c_str(), st_out.c_str());
    if (rc == HJBAC_ERR_UNKNOWN_NAME) {
      std::cerr << "error: " << hjbac_last_error() << "\n";
      return kExitUsage;
    }
    if (rc != HJBAC_OK) {
      std::cerr << "error: " << hjbac_last_error() << "\n";
      return kExitUsage;
    }
    std::cout << "study outputs written to " << st_out << "\n";
    return kExitOk;
  }

  return kExitUsage;
}
