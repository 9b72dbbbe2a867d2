#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aerogrid/booth.hpp"
#include "aerogrid/grid.hpp"

namespace aerogrid::metrics {

using booth::BoothParams;
using booth::ConstraintSet;
using booth::Placement;

struct MetricsConfig {
  double coverage_threshold = 10.0;   // T, AQI units; artifact default
  double population_threshold = 0.5;  // P_threshold for high-impact booths
  double source_radius_cells = 6.0;   // R = 3 * default booth sigma
  double industrial_source_threshold = 0.5;  // industrial >= this marks a source
  ConstraintSet constraints;
  BoothParams booth_params;
  void validate() const;
};

// Sum-ratio percentage reduction. Zero initial sum is undefined.
double overall_improvement(const ScalarField& initial, const ScalarField& final_);

// Like overall_improvement with per-cell population weights. Zero weighted
// initial sum is undefined.
double population_weighted_improvement(const ScalarField& initial,
                                       const ScalarField& final_,
                                       const ScalarField& population);

// Percent of cells whose reduction strictly exceeds threshold.
double spatial_coverage(const ScalarField& initial, const ScalarField& final_,
                        double threshold);

// Mean of (initial - final).
double mean_reduction(const ScalarField& initial, const ScalarField& final_);

// Booths on cells with population strictly above the threshold.
int high_impact_count(const Placement& placement, const ScalarField& population,
                      double population_threshold);

// Percent of sources within `radius_cells` (Euclidean, cell units) of a booth.
// Undefined for an empty source list; zero booths cover nothing.
double source_coverage(const Placement& placement,
                       const std::vector<CellIndex>& sources,
                       double radius_cells, const GridSpec& spec);

// Mean nearest-neighbor distance between booths, km over cell centers.
// Undefined below two booths.
double spacing_efficiency(const Placement& placement, const GridSpec& spec);

// Shannon entropy of the booth-per-cell distribution, nats. K distinct
// cells give ln K. Undefined with zero booths.
double spatial_entropy(const Placement& placement, const GridSpec& spec);

// Artifact definition: mean over booths of channel value at the booth cell
// times the local fractional AQI reduction there (0 where initial AQI is 0).
// Undefined with zero booths.
double impact_score(const Placement& placement, const ScalarField& channel,
                    const ScalarField& initial, const ScalarField& final_);

struct EvaluationReport {
  std::string strategy;
  std::optional<double> overall_aqi_improvement_pct;
  std::optional<double> population_weighted_improvement_pct;
  std::optional<double> spatial_coverage_pct;
  std::optional<double> mean_aqi_reduction;
  std::optional<int> high_impact_placements;
  std::optional<double> pollution_source_coverage_pct;
  std::optional<double> spacing_efficiency_km;
  std::optional<double> spatial_entropy_nats;
  std::array<int, 5> violations{};  // kAllViolationKinds order
  std::optional<double> population_impact_score;
  std::optional<double> traffic_impact_score;
  std::optional<double> industrial_impact_score;
  // field name -> why that field is null
  std::map<std::string, std::string> reasons;
  std::vector<std::string> notes;

  bool operator==(const EvaluationReport&) const = default;
};

// Industrial cells at or above the threshold, row-major order.
std::vector<CellIndex> pollution_sources(const ScalarField& industrial,
                                         double threshold);

// Runs the whole suite; undefined metrics become null fields with a reason.
// Violations are the post-hoc audit of the placement against `state` with
// the initial AQI field.
EvaluationReport evaluate(const ScalarField& initial, const ScalarField& final_,
                          const EnvState& state, const Placement& placement,
                          const MetricsConfig& config);

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text,
                                  const std::string& origin);

// One row per report; columns are exactly the EvaluationReport fields with
// the violation counts flattened. Null fields serialize as empty cells.
std::string comparison_csv(const std::vector<EvaluationReport>& reports);
std::vector<EvaluationReport> comparison_from_csv(const std::string& text,
                                                  const std::string& origin);

// Min-max normalization per metric across strategies (Eq.-27 style): max
// maps to 1, min to 0, a degenerate range to 0.5. Metrics null for any
// report are dropped.
struct RadarData {
  std::vector<std::string> metrics;
  std::vector<std::string> strategies;
  std::vector<std::vector<double>> values;  // [strategy][metric], in [0,1]
};
RadarData radar_normalize(const std::vector<EvaluationReport>& reports);

}  // namespace aerogrid::metrics
