#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aerogrid/booth.hpp"
#include "aerogrid/config.hpp"
#include "aerogrid/grid.hpp"
#include "aerogrid/ingest.hpp"
#include "aerogrid/metrics.hpp"
#include "aerogrid/ppo.hpp"

namespace aerogrid::pipeline {

using config::RunConfig;

// Output names inside output_dir.
std::string placement_file(booth::StrategyKind s);
std::string after_field_file(booth::StrategyKind s);
std::string trace_file(booth::StrategyKind s);
std::string report_file(booth::StrategyKind s);
std::string heatmap_file(booth::StrategyKind s);

inline constexpr const char* kStationsFile = "stations.csv";
inline constexpr const char* kSitesFile = "sites.csv";
inline constexpr const char* kAuxAqiFile = "aux_aqi.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.bin";
inline constexpr const char* kTrainLogFile = "training_log.csv";
inline constexpr const char* kComparisonFile = "comparison.csv";
inline constexpr const char* kManifestFile = "manifest.json";

struct City {
  std::vector<ingest::StationRecord> stations;
  std::vector<ingest::FeatureSite> sites;
  std::optional<ScalarField> aux_aqi;  // second AQI source, when available
};

// Config paths when set, else previously synthesized files in output_dir,
// else a fresh in-memory synthesis.
City make_city(const RunConfig& cfg);

// Full ingestion: impute, average, IDW, fuse, influence channels, zero booth
// grid.
EnvState build_state(const RunConfig& cfg, const City& city);

// The six channel CSVs written by cmd_ingest.
EnvState read_state(const RunConfig& cfg);

void cmd_synth(const RunConfig& cfg);
void cmd_ingest(const RunConfig& cfg, bool self_check = false);
ppo::TrainLog cmd_train(const RunConfig& cfg);
booth::Placement cmd_place(const RunConfig& cfg, booth::StrategyKind strategy);
metrics::EvaluationReport cmd_evaluate(const RunConfig& cfg,
                                       booth::StrategyKind strategy);
std::vector<metrics::EvaluationReport> cmd_compare(const RunConfig& cfg);

}  // namespace aerogrid::pipeline
