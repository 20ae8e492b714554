#include "runio.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "parallel.hpp"

namespace hjbac {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct MetricsCsvWriter::Impl {
  std::ofstream out;
};

MetricsCsvWriter::MetricsCsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) throw IoError("cannot open metrics file: " + path);
  impl_->out << "cycle,step,phase,critic_loss,actor_loss,mse_c,re_c,mse_a,re_a,elapsed_s\n";
  impl_->out.flush();
}

MetricsCsvWriter::~MetricsCsvWriter() { delete impl_; }

void MetricsCsvWriter::write(const MetricsRecord& r) {
  impl_->out << r.cycle << ',' << r.step << ',' << r.phase << ',' << format_double(r.critic_loss)
             << ',' << format_double(r.actor_loss) << ',' << format_double(r.mse_c) << ','
             << format_double(r.re_c) << ',' << format_double(r.mse_a) << ','
             << format_double(r.re_a) << ',' << format_double(r.elapsed_s) << '\n';
  impl_->out.flush();
}

void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& config, std::uint64_t seed, int threads,
                    bool deterministic_timing) {
  nlohmann::json j;
  j["tool"] = "hjbac";
  j["version"] = kVersion;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["threads"] = threads;
  j["output_dir"] = dir;
  j["deterministic_timing"] = deterministic_timing;
  if (!deterministic_timing) {
    const auto now = std::chrono::system_clock::now();
    j["written_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  }
  std::ofstream out(std::filesystem::path(dir) / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir);
  out << j.dump(1) << '\n';
}

void write_agreement_csv(const std::string& path, const AgreementReport& rep) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "x,v,q,v_mc,stderr,exit_mean,censored_frac\n";
  for (const auto& r : rep.rows) {
    out << '"';
    for (Eigen::Index i = 0; i < r.x.size(); ++i) {
      out << (i ? ";" : "") << format_double(r.x(i));
    }
    out << "\"," << format_double(r.value) << ',' << format_double(r.critic) << ','
        << format_double(r.mc) << ',' << format_double(r.std_error) << ','
        << format_double(r.exit_mean) << ',' << format_double(r.censored_fraction) << '\n';
  }
}

void write_histogram_csv(const std::string& path, const HistogramSpec& hist) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < hist.count.size(); ++i) {
    out << format_double(hist.bin_left[i]) << ',' << format_double(hist.bin_right[i]) << ','
        << hist.count[i] << '\n';
  }
}

void write_ntk_variance_csv(const std::string& path, const NtkVarianceStudy& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "width,variance,slope\n";
  for (const auto& r : s.rows) {
    out << r.width << ',' << format_double(r.variance) << ',' << format_double(s.slope) << '\n';
  }
}

void write_init_error_csv(const std::string& path, const InitErrorStudy& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "width,init_error,slope\n";
  for (const auto& r : s.rows) {
    out << r.width << ',' << format_double(r.error) << ',' << format_double(s.slope) << '\n';
  }
}

void write_drift_csv(const std::string& path, const DriftStudy& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "width,actor_outer,actor_inner,actor_bias,critic_outer,critic_inner,critic_bias,"
         "max_slope\n";
  for (const auto& r : s.rows) {
    out << r.width << ',' << format_double(r.actor_outer) << ',' << format_double(r.actor_inner)
        << ',' << format_double(r.actor_bias) << ',' << format_double(r.critic_outer) << ','
        << format_double(r.critic_inner) << ',' << format_double(r.critic_bias) << ','
        << format_double(s.max_slope) << '\n';
  }
}

void write_width_consistency_csv(const std::string& path, const WidthConsistencyStudy& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "width,dist_t0,dist_tend,dist_q_h2,t_end,init_slope\n";
  for (const auto& r : s.rows) {
    out << r.width << ',' << format_double(r.dist_t0) << ',' << format_double(r.dist_tend)
        << ',' << format_double(r.dist_q_h2) << ',' << format_double(s.t_end) << ','
        << format_double(s.init_slope) << '\n';
  }
}

void write_limit_ode_csv(const std::string& path, const LimitOdeResult& res) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "t,residual_critic,residual_actor,dist_q,dist_u\n";
  for (const auto& tp : res.trace) {
    out << format_double(tp.t) << ',' << format_double(tp.residual_critic) << ','
        << format_double(tp.residual_actor) << ',' << format_double(tp.dist_q) << ','
        << format_double(tp.dist_u) << '\n';
  }
}

void write_limit_ode_state_csv(const std::string& path, const LimitOdeState& st) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "x,q,u\n";
  const int d = static_cast<int>(st.nodes.cols());
  for (Eigen::Index g = 0; g < st.nodes.rows(); ++g) {
    out << '"';
    for (int i = 0; i < d; ++i) out << (i ? ";" : "") << format_double(st.nodes(g, i));
    out << "\"," << format_double(st.q(g)) << ',' << format_double(st.u(g)) << '\n';
  }
}

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["actor_width"] = cfg.actor_width;
  j["critic_width"] = cfg.critic_width;
  j["beta"] = cfg.beta;
  j["critic_steps_per_cycle"] = cfg.critic_steps_per_cycle;
  j["actor_steps_per_cycle"] = cfg.actor_steps_per_cycle;
  j["critic_batch"] = cfg.critic_batch;
  j["actor_batch"] = cfg.actor_batch;
  j["optimizer"] = cfg.optimizer == OptimizerKind::adam ? "adam" : "sgd";
  j["adam_beta1"] = cfg.adam.beta1;
  j["adam_beta2"] = cfg.adam.beta2;
  j["adam_eps"] = cfg.adam.eps;
  j["lr_critic"] = cfg.lr_critic;
  j["lr_actor"] = cfg.lr_actor;
  j["scheduler"] = cfg.scheduler == SchedulerKind::constant ? "constant" : "inverse_cycle";
  j["total_cycles"] = cfg.total_cycles;
  j["truncation"] = cfg.truncation == TruncationChoice::smooth ? "smooth" : "identity";
  j["truncation_delta"] = cfg.truncation_delta;
  if (cfg.loss_floor) {
    j["loss_floor"] = *cfg.loss_floor;
  } else {
    j["loss_floor"] = nullptr;
  }
  j["ntk_rate_factor"] = cfg.ntk_rate_factor;
  j["seed"] = cfg.seed;
  j["eval_points"] = cfg.eval_points;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.actor_width = j.value("actor_width", cfg.actor_width);
  cfg.critic_width = j.value("critic_width", cfg.critic_width);
  cfg.beta = j.value("beta", cfg.beta);
  cfg.critic_steps_per_cycle = j.value("critic_steps_per_cycle", cfg.critic_steps_per_cycle);
  cfg.actor_steps_per_cycle = j.value("actor_steps_per_cycle", cfg.actor_steps_per_cycle);
  cfg.critic_batch = j.value("critic_batch", cfg.critic_batch);
  cfg.actor_batch = j.value("actor_batch", cfg.actor_batch);
  if (j.contains("optimizer")) {
    const std::string o = j["optimizer"];
    if (o == "adam") {
      cfg.optimizer = OptimizerKind::adam;
    } else if (o == "sgd") {
      cfg.optimizer = OptimizerKind::sgd;
    } else {
      throw ConfigError("unknown optimizer: " + o);
    }
  }
  cfg.adam.beta1 = j.value("adam_beta1", cfg.adam.beta1);
  cfg.adam.beta2 = j.value("adam_beta2", cfg.adam.beta2);
  cfg.adam.eps = j.value("adam_eps", cfg.adam.eps);
  cfg.lr_critic = j.value("lr_critic", cfg.lr_critic);
  cfg.lr_actor = j.value("lr_actor", cfg.lr_actor);
  if (j.contains("scheduler")) {
    const std::string s = j["scheduler"];
    if (s == "constant") {
      cfg.scheduler = SchedulerKind::constant;
    } else if (s == "inverse_cycle") {
      cfg.scheduler = SchedulerKind::inverse_cycle;
    } else {
      throw ConfigError("unknown scheduler: " + s);
    }
  }
  cfg.total_cycles = j.value("total_cycles", cfg.total_cycles);
  if (j.contains("truncation")) {
    const std::string t = j["truncation"];
    if (t == "smooth") {
      cfg.truncation = TruncationChoice::smooth;
    } else if (t == "identity") {
      cfg.truncation = TruncationChoice::identity;
    } else {
      throw ConfigError("unknown truncation mode: " + t);
    }
  }
  cfg.truncation_delta = j.value("truncation_delta", cfg.truncation_delta);
  if (j.contains("loss_floor") && !j["loss_floor"].is_null()) {
    cfg.loss_floor = j["loss_floor"].get<double>();
  }
  cfg.ntk_rate_factor = j.value("ntk_rate_factor", cfg.ntk_rate_factor);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.eval_points = j.value("eval_points", cfg.eval_points);
  return cfg;
}

nlohmann::json mc_config_to_json(const McConfig& cfg) {
  nlohmann::json j;
  j["dt"] = cfg.dt;
  j["paths_per_point"] = cfg.paths_per_point;
  j["eval_points"] = cfg.eval_points;
  j["max_time"] = cfg.max_time;
  j["seed"] = cfg.seed;
  return j;
}

McConfig mc_config_from_json(const nlohmann::json& j) {
  McConfig cfg;
  cfg.dt = j.value("dt", cfg.dt);
  cfg.paths_per_point = j.value("paths_per_point", cfg.paths_per_point);
  cfg.eval_points = j.value("eval_points", cfg.eval_points);
  cfg.max_time = j.value("max_time", cfg.max_time);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

}  // namespace hjbac
