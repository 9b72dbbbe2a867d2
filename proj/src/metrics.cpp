#include "aerogrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

#include "aerogrid/errors.hpp"
#include "aerogrid/io.hpp"
#include "json.hpp"

namespace aerogrid::metrics {

namespace {

void require_same_spec(const ScalarField& a, const ScalarField& b,
                       const char* what) {
  if (!(a.spec() == b.spec())) {
    throw DomainError(std::string(what) + ": fields are on different grids");
  }
}

constexpr const char* kNotes[] = {
    "impact_score is an artifact definition: mean over booths of channel "
    "value times local fractional AQI reduction",
    "spatial_entropy equals ln K whenever all K booths occupy distinct "
    "cells, so it cannot discriminate such strategies",
    "coverage threshold T and source radius R are artifact defaults",
};

}  // namespace

void MetricsConfig::validate() const {
  if (!(coverage_threshold >= 0.0)) {
    throw ValidationError("coverage_threshold must be >= 0");
  }
  if (!(population_threshold >= 0.0) || !(population_threshold <= 1.0)) {
    throw ValidationError("population_threshold must be in [0, 1]");
  }
  if (!(source_radius_cells > 0.0)) {
    throw ValidationError("source_radius_cells must be > 0");
  }
  if (!(industrial_source_threshold >= 0.0) ||
      !(industrial_source_threshold <= 1.0)) {
    throw ValidationError("industrial_source_threshold must be in [0, 1]");
  }
  constraints.validate();
  booth_params.validate();
}

double overall_improvement(const ScalarField& initial,
                           const ScalarField& final_) {
  require_same_spec(initial, final_, "overall_improvement");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < initial.spec().cell_count(); ++i) {
    num += initial.at_flat(i) - final_.at_flat(i);
    den += initial.at_flat(i);
  }
  if (den == 0.0) {
    throw UndefinedMetricError("overall improvement: initial AQI sums to zero");
  }
  return num / den * 100.0;
}

double population_weighted_improvement(const ScalarField& initial,
                                       const ScalarField& final_,
                                       const ScalarField& population) {
  require_same_spec(initial, final_, "population_weighted_improvement");
  require_same_spec(initial, population, "population_weighted_improvement");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < initial.spec().cell_count(); ++i) {
    double p = population.at_flat(i);
    num += p * (initial.at_flat(i) - final_.at_flat(i));
    den += p * initial.at_flat(i);
  }
  if (den == 0.0) {
    throw UndefinedMetricError(
        "population-weighted improvement: weighted initial AQI sums to zero");
  }
  return num / den * 100.0;
}

double spatial_coverage(const ScalarField& initial, const ScalarField& final_,
                        double threshold) {
  require_same_spec(initial, final_, "spatial_coverage");
  if (!(threshold >= 0.0)) {
    throw DomainError("spatial_coverage: threshold must be >= 0");
  }
  std::size_t n = initial.spec().cell_count();
  std::size_t hit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (initial.at_flat(i) - final_.at_flat(i) > threshold) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(n) * 100.0;
}

double mean_reduction(const ScalarField& initial, const ScalarField& final_) {
  require_same_spec(initial, final_, "mean_reduction");
  double sum = 0.0;
  std::size_t n = initial.spec().cell_count();
  for (std::size_t i = 0; i < n; ++i) {
    sum += initial.at_flat(i) - final_.at_flat(i);
  }
  return sum / static_cast<double>(n);
}

int high_impact_count(const Placement& placement,
                      const ScalarField& population,
                      double population_threshold) {
  int count = 0;
  for (CellIndex cell : placement.cells) {
    if (population.at(cell) > population_threshold) ++count;
  }
  return count;
}

double source_coverage(const Placement& placement,
                       const std::vector<CellIndex>& sources,
                       double radius_cells, const GridSpec& spec) {
  if (!(radius_cells > 0.0)) {
    throw DomainError("source_coverage: radius must be > 0");
  }
  if (sources.empty()) {
    throw UndefinedMetricError("source coverage: no pollution sources");
  }
  for (CellIndex s : sources) {
    if (!in_bounds(spec, s)) {
      throw DomainError("source_coverage: source cell out of bounds");
    }
  }
  std::size_t covered = 0;
  for (CellIndex s : sources) {
    for (CellIndex b : placement.cells) {
      if (euclidean_cells(s, b) <= radius_cells) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(sources.size()) *
         100.0;
}

double spacing_efficiency(const Placement& placement, const GridSpec& spec) {
  if (placement.size() < 2) {
    throw UndefinedMetricError(
        "spacing efficiency: needs at least two booths");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < placement.cells.size(); ++i) {
    GeoPoint a = cell_to_geo(spec, placement.cells[i]);
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < placement.cells.size(); ++j) {
      if (j == i) continue;
      nearest =
          std::min(nearest, haversine_km(a, cell_to_geo(spec, placement.cells[j])));
    }
    sum += nearest;
  }
  return sum / static_cast<double>(placement.size());
}

double spatial_entropy(const Placement& placement, const GridSpec& spec) {
  if (placement.cells.empty()) {
    throw UndefinedMetricError("spatial entropy: no booths");
  }
  std::unordered_map<std::size_t, int> counts;
  for (CellIndex cell : placement.cells) {
    if (!in_bounds(spec, cell)) {
      throw DomainError("spatial_entropy: booth cell out of bounds");
    }
    ++counts[flat_index(spec, cell)];
  }
  double k = static_cast<double>(placement.size());
  double h = 0.0;
  for (const auto& [flat, c] : counts) {
    double p = static_cast<double>(c) / k;
    h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;  // guard the -0.0 of a single occupied cell
}

double impact_score(const Placement& placement, const ScalarField& channel,
                    const ScalarField& initial, const ScalarField& final_) {
  require_same_spec(initial, final_, "impact_score");
  require_same_spec(initial, channel, "impact_score");
  if (placement.cells.empty()) {
    throw UndefinedMetricError("impact score: no booths");
  }
  double sum = 0.0;
  for (CellIndex cell : placement.cells) {
    double init = initial.at(cell);
    double frac = init > 0.0 ? (init - final_.at(cell)) / init : 0.0;
    sum += channel.at(cell) * frac;
  }
  return sum / static_cast<double>(placement.size());
}

std::vector<CellIndex> pollution_sources(const ScalarField& industrial,
                                         double threshold) {
  std::vector<CellIndex> out;
  const GridSpec& spec = industrial.spec();
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    if (industrial.at_flat(i) >= threshold) {
      out.push_back(cell_from_flat(spec, i));
    }
  }
  return out;
}

EvaluationReport evaluate(const ScalarField& initial, const ScalarField& final_,
                          const EnvState& state, const Placement& placement,
                          const MetricsConfig& config) {
  config.validate();
  require_same_spec(initial, state.aqi, "evaluate");
  EvaluationReport r;
  r.strategy = booth::strategy_name(placement.strategy);

  auto guard = [&r](const char* field, auto&& fn, auto& slot) {
    try {
      slot = fn();
    } catch (const UndefinedMetricError& e) {
      slot.reset();
      r.reasons[field] = e.what();
    }
  };

  guard(
      "overall_aqi_improvement_pct",
      [&] { return overall_improvement(initial, final_); },
      r.overall_aqi_improvement_pct);
  guard(
      "population_weighted_improvement_pct",
      [&] {
        return population_weighted_improvement(initial, final_,
                                               state.population);
      },
      r.population_weighted_improvement_pct);
  r.spatial_coverage_pct =
      spatial_coverage(initial, final_, config.coverage_threshold);
  r.mean_aqi_reduction = mean_reduction(initial, final_);
  r.high_impact_placements =
      high_impact_count(placement, state.population, config.population_threshold);
  guard(
      "pollution_source_coverage_pct",
      [&] {
        return source_coverage(
            placement,
            pollution_sources(state.industrial,
                              config.industrial_source_threshold),
            config.source_radius_cells, initial.spec());
      },
      r.pollution_source_coverage_pct);
  guard(
      "spacing_efficiency_km",
      [&] { return spacing_efficiency(placement, initial.spec()); },
      r.spacing_efficiency_km);
  guard(
      "spatial_entropy_nats",
      [&] { return spatial_entropy(placement, initial.spec()); },
      r.spatial_entropy_nats);

  EnvState audit_state(initial, state.population, state.traffic,
                       state.industrial, state.green,
                       ScalarField::zeros(initial.spec(), Channel::Booth));
  r.violations = booth::audit_placement(audit_state, placement,
                                        config.constraints, config.booth_params);

  guard(
      "population_impact_score",
      [&] { return impact_score(placement, state.population, initial, final_); },
      r.population_impact_score);
  guard(
      "traffic_impact_score",
      [&] { return impact_score(placement, state.traffic, initial, final_); },
      r.traffic_impact_score);
  guard(
      "industrial_impact_score",
      [&] { return impact_score(placement, state.industrial, initial, final_); },
      r.industrial_impact_score);

  for (const char* note : kNotes) r.notes.emplace_back(note);
  return r;
}

namespace {

void put_opt(nlohmann::ordered_json& j, const char* key,
             const std::optional<double>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

std::optional<double> get_opt(const nlohmann::ordered_json& j, const char* key,
                              const std::string& origin) {
  if (!j.contains(key)) {
    throw ValidationError(origin + ": missing field " + key);
  }
  if (j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["strategy"] = report.strategy;
  put_opt(j, "overall_aqi_improvement_pct", report.overall_aqi_improvement_pct);
  put_opt(j, "population_weighted_improvement_pct",
          report.population_weighted_improvement_pct);
  put_opt(j, "spatial_coverage_pct", report.spatial_coverage_pct);
  put_opt(j, "mean_aqi_reduction", report.mean_aqi_reduction);
  if (report.high_impact_placements) {
    j["high_impact_placements"] = *report.high_impact_placements;
  } else {
    j["high_impact_placements"] = nullptr;
  }
  put_opt(j, "pollution_source_coverage_pct",
          report.pollution_source_coverage_pct);
  put_opt(j, "spacing_efficiency_km", report.spacing_efficiency_km);
  put_opt(j, "spatial_entropy_nats", report.spatial_entropy_nats);
  nlohmann::ordered_json v;
  for (std::size_t i = 0; i < booth::kAllViolationKinds.size(); ++i) {
    v[booth::violation_name(booth::kAllViolationKinds[i])] =
        report.violations[i];
  }
  j["violations"] = v;
  put_opt(j, "population_impact_score", report.population_impact_score);
  put_opt(j, "traffic_impact_score", report.traffic_impact_score);
  put_opt(j, "industrial_impact_score", report.industrial_impact_score);
  j["reasons"] = report.reasons;
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text,
                                  const std::string& origin) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  try {
    EvaluationReport r;
    r.strategy = j.at("strategy").get<std::string>();
    r.overall_aqi_improvement_pct =
        get_opt(j, "overall_aqi_improvement_pct", origin);
    r.population_weighted_improvement_pct =
        get_opt(j, "population_weighted_improvement_pct", origin);
    r.spatial_coverage_pct = get_opt(j, "spatial_coverage_pct", origin);
    r.mean_aqi_reduction = get_opt(j, "mean_aqi_reduction", origin);
    if (j.at("high_impact_placements").is_null()) {
      r.high_impact_placements.reset();
    } else {
      r.high_impact_placements = j.at("high_impact_placements").get<int>();
    }
    r.pollution_source_coverage_pct =
        get_opt(j, "pollution_source_coverage_pct", origin);
    r.spacing_efficiency_km = get_opt(j, "spacing_efficiency_km", origin);
    r.spatial_entropy_nats = get_opt(j, "spatial_entropy_nats", origin);
    const auto& v = j.at("violations");
    for (std::size_t i = 0; i < booth::kAllViolationKinds.size(); ++i) {
      r.violations[i] =
          v.at(booth::violation_name(booth::kAllViolationKinds[i])).get<int>();
    }
    r.population_impact_score = get_opt(j, "population_impact_score", origin);
    r.traffic_impact_score = get_opt(j, "traffic_impact_score", origin);
    r.industrial_impact_score = get_opt(j, "industrial_impact_score", origin);
    for (const auto& [key, value] : j.at("reasons").items()) {
      r.reasons[key] = value.get<std::string>();
    }
    for (const auto& note : j.at("notes")) {
      r.notes.push_back(note.get<std::string>());
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

namespace {

constexpr const char* kCsvHeader =
    "strategy,overall_aqi_improvement_pct,population_weighted_improvement_pct,"
    "spatial_coverage_pct,mean_aqi_reduction,high_impact_placements,"
    "pollution_source_coverage_pct,spacing_efficiency_km,spatial_entropy_nats,"
    "violations_distance,violations_greenspace,violations_max_booths,"
    "violations_population,violations_improvement,population_impact_score,"
    "traffic_impact_score,industrial_impact_score";

std::string cell(const std::optional<double>& v) {
  return v ? io::fmt_double(*v) : std::string();
}

}  // namespace

std::string comparison_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const EvaluationReport& r : reports) {
    out += r.strategy;
    out += ',' + cell(r.overall_aqi_improvement_pct);
    out += ',' + cell(r.population_weighted_improvement_pct);
    out += ',' + cell(r.spatial_coverage_pct);
    out += ',' + cell(r.mean_aqi_reduction);
    out += ',';
    if (r.high_impact_placements) {
      out += std::to_string(*r.high_impact_placements);
    }
    out += ',' + cell(r.pollution_source_coverage_pct);
    out += ',' + cell(r.spacing_efficiency_km);
    out += ',' + cell(r.spatial_entropy_nats);
    for (int count : r.violations) out += ',' + std::to_string(count);
    out += ',' + cell(r.population_impact_score);
    out += ',' + cell(r.traffic_impact_score);
    out += ',' + cell(r.industrial_impact_score);
    out += '\n';
  }
  return out;
}

std::vector<EvaluationReport> comparison_from_csv(const std::string& text,
                                                  const std::string& origin) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kCsvHeader) {
    throw ValidationError(origin + ": bad comparison header");
  }
  std::vector<EvaluationReport> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    std::vector<std::string> f = io::split_csv_line(lines[li]);
    if (f.size() != 17) {
      throw ValidationError(origin + " line " + std::to_string(li + 1) +
                            ": expected 17 fields, got " +
                            std::to_string(f.size()));
    }
    auto opt = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return io::parse_double(s, origin);
    };
    EvaluationReport r;
    r.strategy = f[0];
    r.overall_aqi_improvement_pct = opt(f[1]);
    r.population_weighted_improvement_pct = opt(f[2]);
    r.spatial_coverage_pct = opt(f[3]);
    r.mean_aqi_reduction = opt(f[4]);
    if (f[5].empty()) {
      r.high_impact_placements.reset();
    } else {
      r.high_impact_placements = io::parse_int(f[5], origin);
    }
    r.pollution_source_coverage_pct = opt(f[6]);
    r.spacing_efficiency_km = opt(f[7]);
    r.spatial_entropy_nats = opt(f[8]);
    for (int i = 0; i < 5; ++i) {
      r.violations[i] = io::parse_int(f[9 + static_cast<std::size_t>(i)], origin);
    }
    r.population_impact_score = opt(f[14]);
    r.traffic_impact_score = opt(f[15]);
    r.industrial_impact_score = opt(f[16]);
    out.push_back(std::move(r));
  }
  return out;
}

RadarData radar_normalize(const std::vector<EvaluationReport>& reports) {
  struct Axis {
    const char* name;
    std::optional<double> (*get)(const EvaluationReport&);
  };
  static const Axis kAxes[] = {
      {"overall_aqi_improvement_pct",
       [](const EvaluationReport& r) { return r.overall_aqi_improvement_pct; }},
      {"population_weighted_improvement_pct",
       [](const EvaluationReport& r) {
         return r.population_weighted_improvement_pct;
       }},
      {"spatial_coverage_pct",
       [](const EvaluationReport& r) { return r.spatial_coverage_pct; }},
      {"mean_aqi_reduction",
       [](const EvaluationReport& r) { return r.mean_aqi_reduction; }},
      {"high_impact_placements",
       [](const EvaluationReport& r) -> std::optional<double> {
         if (!r.high_impact_placements) return std::nullopt;
         return static_cast<double>(*r.high_impact_placements);
       }},
      {"pollution_source_coverage_pct",
       [](const EvaluationReport& r) {
         return r.pollution_source_coverage_pct;
       }},
      {"spacing_efficiency_km",
       [](const EvaluationReport& r) { return r.spacing_efficiency_km; }},
      {"spatial_entropy_nats",
       [](const EvaluationReport& r) { return r.spatial_entropy_nats; }},
      {"population_impact_score",
       [](const EvaluationReport& r) { return r.population_impact_score; }},
      {"traffic_impact_score",
       [](const EvaluationReport& r) { return r.traffic_impact_score; }},
      {"industrial_impact_score",
       [](const EvaluationReport& r) { return r.industrial_impact_score; }},
  };
  RadarData out;
  for (const EvaluationReport& r : reports) out.strategies.push_back(r.strategy);
  out.values.assign(reports.size(), {});
  for (const Axis& axis : kAxes) {
    std::vector<double> raw;
    raw.reserve(reports.size());
    bool all_defined = true;
    for (const EvaluationReport& r : reports) {
      std::optional<double> v = axis.get(r);
      if (!v) {
        all_defined = false;
        break;
      }
      raw.push_back(*v);
    }
    if (!all_defined || raw.empty()) continue;
    double lo = *std::min_element(raw.begin(), raw.end());
    double hi = *std::max_element(raw.begin(), raw.end());
    out.metrics.emplace_back(axis.name);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      double norm = hi > lo ? (raw[i] - lo) / (hi - lo) : 0.5;
      out.values[i].push_back(norm);
    }
  }
  return out;
}

}  // namespace aerogrid::metrics
