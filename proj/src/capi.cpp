#include "hjbac/hjbac.h"

#include <cmath>
#include <filesystem>
#include <string>

#include "parallel.hpp"
#include "runio.hpp"

using namespace hjbac;

struct hjbac_problem {
  ProblemSpec spec;
};

struct hjbac_net {
  ShallowNet net;
};

namespace {

thread_local std::string t_error;

hjbac_status fail(hjbac_status code, const std::string& msg) {
  t_error = msg;
  return code;
}

hjbac_status map_exception() {
  try {
    throw;
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("unknown problem", 0) == 0 || msg.rfind("unknown study", 0) == 0) {
      return fail(HJBAC_ERR_UNKNOWN_NAME, msg);
    }
    return fail(HJBAC_ERR_INVALID_ARG, msg);
  } catch (const IoError& e) {
    return fail(HJBAC_ERR_IO, e.what());
  } catch (const NumericError& e) {
    return fail(HJBAC_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(HJBAC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HJBAC_ERR_INTERNAL, "unknown error");
  }
}

nlohmann::json parse_config(const char* config_json) {
  if (!config_json || !*config_json) return nlohmann::json::object();
  const auto j = nlohmann::json::parse(config_json, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  return j;
}

void ensure_dir(const char* dir) {
  if (!dir || !*dir) throw ConfigError("output directory is required");
  std::filesystem::create_directories(dir);
}

std::vector<int> widths_from(const nlohmann::json& j, const char* key,
                             std::vector<int> fallback) {
  if (!j.contains(key)) return fallback;
  std::vector<int> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<int>());
  if (out.empty()) throw ConfigError("widths list is empty");
  return out;
}

}  // namespace

extern "C" {

const char* hjbac_version(void) { return kVersion; }

const char* hjbac_last_error(void) { return t_error.c_str(); }

void hjbac_set_threads(int threads) { set_threads(threads); }

const char* hjbac_catalog(void) {
  static const std::string listing = [] {
    std::string s;
    for (const auto& name : catalog()) {
      s += name;
      s += '\n';
    }
    return s;
  }();
  return listing.c_str();
}

hjbac_status hjbac_problem_create(const char* name, int dim, hjbac_problem** out) {
  if (!name || !out) return fail(HJBAC_ERR_INVALID_ARG, "name and out are required");
  try {
    std::optional<int> d;
    if (dim > 0) d = dim;
    auto* p = new hjbac_problem{preset(name, d)};
    *out = p;
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

void hjbac_problem_destroy(hjbac_problem* p) { delete p; }

int hjbac_problem_dim(const hjbac_problem* p) { return p ? p->spec.domain.dim : 0; }
int hjbac_problem_action_dim(const hjbac_problem* p) { return p ? p->spec.action_dim : 0; }
int hjbac_problem_has_analytic(const hjbac_problem* p) {
  return p && p->spec.has_analytic() ? 1 : 0;
}

hjbac_status hjbac_problem_value(const hjbac_problem* p, const double* x, double* out) {
  if (!p || !x || !out) return fail(HJBAC_ERR_INVALID_ARG, "null argument");
  if (!p->spec.value_field) {
    return fail(HJBAC_ERR_INVALID_ARG, "problem has no analytic value function");
  }
  try {
    *out = p->spec.value_field->value({x, static_cast<std::size_t>(p->spec.domain.dim)});
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

hjbac_status hjbac_problem_control(const hjbac_problem* p, const double* x, double* out) {
  if (!p || !x || !out) return fail(HJBAC_ERR_INVALID_ARG, "null argument");
  if (!p->spec.optimal_control) {
    return fail(HJBAC_ERR_INVALID_ARG, "problem has no analytic control");
  }
  try {
    p->spec.optimal_control({x, static_cast<std::size_t>(p->spec.domain.dim)},
                            {out, static_cast<std::size_t>(p->spec.action_dim)});
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

hjbac_status hjbac_net_load(const char* path, hjbac_net** out) {
  if (!path || !out) return fail(HJBAC_ERR_INVALID_ARG, "null argument");
  try {
    *out = new hjbac_net{load_net(path)};
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

hjbac_status hjbac_net_save(const hjbac_net* net, const char* path) {
  if (!net || !path) return fail(HJBAC_ERR_INVALID_ARG, "null argument");
  try {
    save_net(net->net, path);
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

void hjbac_net_destroy(hjbac_net* net) { delete net; }

int hjbac_net_width(const hjbac_net* net) { return net ? net->net.width() : 0; }
int hjbac_net_input_dim(const hjbac_net* net) { return net ? net->net.input_dim() : 0; }
int hjbac_net_output_dim(const hjbac_net* net) { return net ? net->net.output_dim() : 0; }

hjbac_status hjbac_net_eval(const hjbac_net* net, const double* x, double* out) {
  if (!net || !x || !out) return fail(HJBAC_ERR_INVALID_ARG, "null argument");
  try {
    net->net.forward({x, static_cast<std::size_t>(net->net.input_dim())},
                     {out, static_cast<std::size_t>(net->net.output_dim())});
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

hjbac_status hjbac_critic_value(const hjbac_problem* p, const hjbac_net* net, const double* x,
                                double* out) {
  if (!p || !net || !x || !out) return fail(HJBAC_ERR_INVALID_ARG, "null argument");
  if (net->net.input_dim() != p->spec.domain.dim || net->net.output_dim() != 1) {
    return fail(HJBAC_ERR_INVALID_ARG, "critic network does not match the problem");
  }
  try {
    const CriticNet critic = critic_for_problem(p->spec, net->net);
    *out = critic.value({x, static_cast<std::size_t>(p->spec.domain.dim)});
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

hjbac_status hjbac_train(const hjbac_problem* p, const char* config_json, const char* out_dir,
                         hjbac_train_summary* summary) {
  if (!p) return fail(HJBAC_ERR_INVALID_ARG, "problem is required");
  try {
    const nlohmann::json j = parse_config(config_json);
    const TrainConfig cfg = train_config_from_json(j);
    cfg.validate();
    const bool wall_time = j.value("timing", std::string("wall")) != "off";
    ensure_dir(out_dir);
    const std::filesystem::path dir(out_dir);

    MetricsCsvWriter writer((dir / "metrics.csv").string());
    const TrainResult res = train(
        p->spec, cfg, [&](const MetricsRecord& r) { writer.write(r); }, wall_time);
    save_net(res.actor, (dir / "actor.json").string());
    save_net(res.critic_z, (dir / "critic.json").string());
    nlohmann::json cfg_json = train_config_to_json(cfg);
    cfg_json["timing"] = wall_time ? "wall" : "off";
    cfg_json["problem"] = p->spec.name;
    cfg_json["dim"] = p->spec.domain.dim;
    write_manifest(out_dir, "train", cfg_json, cfg.seed, thread_count(), !wall_time);

    if (summary) {
      *summary = {};
      summary->cycles_run = res.cycles_run;
      summary->diverged = res.diverged ? 1 : 0;
      if (!res.history.empty()) {
        const auto& last = res.history.back();
        summary->final_mse_critic = last.mse_c;
        summary->final_re_critic = last.re_c;
        summary->final_mse_actor = last.mse_a;
        summary->final_re_actor = last.re_a;
        const std::size_t n = res.history.size();
        const std::size_t w = std::max<std::size_t>(1, n / 10);
        double mc = 0, rc = 0, ma = 0, ra = 0;
        for (std::size_t i = n - w; i < n; ++i) {
          mc += res.history[i].mse_c;
          rc += res.history[i].re_c;
          ma += res.history[i].mse_a;
          ra += res.history[i].re_a;
        }
        summary->window_mse_critic = mc / w;
        summary->window_re_critic = rc / w;
        summary->window_mse_actor = ma / w;
        summary->window_re_actor = ra / w;
      }
    }
    if (res.diverged) {
      return fail(HJBAC_ERR_DIVERGED, "training diverged: " + res.divergence_reason);
    }
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

hjbac_status hjbac_verify_mc(const hjbac_problem* p, const hjbac_net* actor,
                             const hjbac_net* critic, const char* config_json,
                             const char* out_dir, double* e_out) {
  if (!p || !actor || !critic) return fail(HJBAC_ERR_INVALID_ARG, "null argument");
  const auto& spec = p->spec;
  if (actor->net.input_dim() != spec.domain.dim ||
      actor->net.output_dim() != spec.action_dim) {
    return fail(HJBAC_ERR_INVALID_ARG, "actor checkpoint does not match the problem");
  }
  if (critic->net.input_dim() != spec.domain.dim || critic->net.output_dim() != 1) {
    return fail(HJBAC_ERR_INVALID_ARG, "critic checkpoint does not match the problem");
  }
  try {
    const nlohmann::json j = parse_config(config_json);
    const McConfig cfg = mc_config_from_json(j);
    cfg.validate();
    ensure_dir(out_dir);
    const std::filesystem::path dir(out_dir);
    const CriticNet cn = critic_for_problem(spec, critic->net);
    const AgreementReport rep = agreement_report(spec, actor->net, cn, cfg);
    write_agreement_csv((dir / "agreement.csv").string(), rep);
    for (const auto& h : rep.histograms) {
      write_histogram_csv((dir / ("histogram_" + h.name + ".csv")).string(), h);
    }
    nlohmann::json cfg_json = mc_config_to_json(cfg);
    cfg_json["problem"] = spec.name;
    write_manifest(out_dir, "verify-mc", cfg_json, cfg.seed, thread_count(), false);
    if (e_out) {
      e_out[0] = rep.e1;
      e_out[1] = rep.e2;
      e_out[2] = rep.e3;
    }
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

hjbac_status hjbac_study(const char* name, const char* config_json, const char* out_dir) {
  if (!name) return fail(HJBAC_ERR_INVALID_ARG, "study name is required");
  try {
    const nlohmann::json j = parse_config(config_json);
    ensure_dir(out_dir);
    const std::filesystem::path dir(out_dir);
    const std::string study(name);
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});
    const double beta = j.value("beta", 0.75);

    if (study == "ntk-variance") {
      const auto widths = widths_from(j, "widths", {64, 128, 256, 512, 1024, 2048, 4096});
      const auto s = ntk_variance_study(widths, j.value("reinits", 200), j.value("dim", 2),
                                        beta, seed);
      write_ntk_variance_csv((dir / "ntk_variance.csv").string(), s);
    } else if (study == "init-error") {
      const auto widths = widths_from(j, "widths", {64, 128, 256, 512, 1024, 2048, 4096});
      const ProblemSpec prob = preset(j.value("problem", std::string("toy1d")));
      const auto s = init_error_study(prob, widths, j.value("seeds", 32),
                                      j.value("sample_points", 512), beta, seed);
      write_init_error_csv((dir / "init_error.csv").string(), s);
    } else if (study == "param-drift") {
      const auto widths = widths_from(j, "widths", {128, 256, 512, 1024});
      std::optional<int> dim;
      if (j.contains("dim")) dim = j["dim"].get<int>();
      const ProblemSpec prob = preset(j.value("problem", std::string("problem1")), dim);
      const auto s = param_drift_study(prob, widths, j.value("seeds", 3),
                                       j.value("iterations", 200), j.value("dt", 0.01), beta,
                                       j.value("quad_points", 512), seed);
      write_drift_csv((dir / "param_drift.csv").string(), s);
    } else if (study == "limit-ode") {
      const ProblemSpec prob = preset(j.value("problem", std::string("toy1d")));
      LimitOdeConfig cfg;
      cfg.grid_n = j.value("grid_n", cfg.grid_n);
      cfg.kernel_samples = j.value("kernel_samples", cfg.kernel_samples);
      cfg.dt = j.value("dt", cfg.dt);
      cfg.t_end = j.value("T", cfg.t_end);
      cfg.alpha = j.value("alpha", cfg.alpha);
      cfg.omega = j.value("omega", cfg.omega);
      cfg.seed = seed;
      cfg.record_every = j.value("record_every", cfg.record_every);
      cfg.kernel_cache_dir = j.value("kernel_cache", std::string());
      const LimitOdeResult res = limit_ode_integrate(prob, cfg);
      write_limit_ode_csv((dir / "limit_ode_trace.csv").string(), res);
      write_limit_ode_state_csv((dir / "limit_ode_state.csv").string(), res.state);
    } else if (study == "width-consistency") {
      const auto widths = widths_from(j, "widths", {64, 256, 1024, 4096});
      const ProblemSpec prob = preset(j.value("problem", std::string("toy1d")));
      LimitOdeConfig ode;
      ode.grid_n = j.value("grid_n", 65);
      ode.kernel_samples = j.value("kernel_samples", 100000L);
      ode.dt = j.value("ode_dt", 1e-3);
      ode.seed = derive_seed(seed, 7);
      const auto s = width_consistency_study(prob, widths, j.value("seeds", 3),
                                             j.value("T", 5.0), j.value("dt_train", 0.01),
                                             beta, ode, seed);
      write_width_consistency_csv((dir / "width_consistency.csv").string(), s);
    } else {
      throw ConfigError("unknown study: " + study);
    }
    nlohmann::json cfg_json = j;
    cfg_json["study"] = study;
    write_manifest(out_dir, "study", cfg_json, seed, thread_count(), false);
    return HJBAC_OK;
  } catch (...) {
    return map_exception();
  }
}

}  // extern "C"
