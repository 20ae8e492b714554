#pragma once

#include <string>

#include "json.hpp"
#include "mc_value.hpp"
#include "studies.hpp"
#include "trainer.hpp"

namespace hjbac {

inline constexpr int kCsvSchemaVersion = 1;

/// Shortest round-trip decimal form of a double (to_chars).
std::string format_double(double v);

/// Streams metrics rows to <dir>/metrics.csv as training progresses.
class MetricsCsvWriter {
 public:
  explicit MetricsCsvWriter(const std::string& path);
  ~MetricsCsvWriter();
  void write(const MetricsRecord& rec);

 private:
  struct Impl;
  Impl* impl_;
};

/// Writes <dir>/manifest.json describing one CLI run. config holds the fully
/// resolved options; deterministic_timing records whether wall-clock fields
/// were suppressed for byte-stable replay.
void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& config, std::uint64_t seed, int threads,
                    bool deterministic_timing);

void write_agreement_csv(const std::string& path, const AgreementReport& rep);
void write_histogram_csv(const std::string& path, const HistogramSpec& hist);

void write_ntk_variance_csv(const std::string& path, const NtkVarianceStudy& s);
void write_init_error_csv(const std::string& path, const InitErrorStudy& s);
void write_drift_csv(const std::string& path, const DriftStudy& s);
void write_width_consistency_csv(const std::string& path, const WidthConsistencyStudy& s);
void write_limit_ode_csv(const std::string& path, const LimitOdeResult& res);
void write_limit_ode_state_csv(const std::string& path, const LimitOdeState& st);

/// TrainConfig <-> flat JSON (field names match the struct).
nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json mc_config_to_json(const McConfig& cfg);
McConfig mc_config_from_json(const nlohmann::json& j);

}  // namespace hjbac
