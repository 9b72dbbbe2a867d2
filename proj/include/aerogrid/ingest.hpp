#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aerogrid/grid.hpp"

namespace aerogrid::ingest {

struct Reading {
  int hour = 0;
  std::optional<double> aqi;  // empty = missing, to be imputed
};

struct StationRecord {
  std::string id;
  GeoPoint location;
  std::vector<Reading> readings;
};

enum class FeatureKind { Population, Traffic, Industrial, Green };

const char* feature_kind_name(FeatureKind k);
FeatureKind feature_kind_from_name(const std::string& name);
Channel channel_of(FeatureKind k);

struct FeatureSite {
  FeatureKind kind = FeatureKind::Population;
  GeoPoint location;
  double magnitude = 0.0;     // density / vehicle count / hectares, kind-specific
  double radius_cells = 1.0;  // support radius for the linear-decay kernel
};

void validate_site(const FeatureSite& s);

struct SyntheticCityConfig {
  std::uint64_t seed = 42;
  int n_stations = 12;
  int n_pop_sites = 10;
  int n_traffic_sites = 8;
  int n_industrial_sites = 6;
  int n_green_sites = 6;
  double hotspot_intensity = 300.0;
  void validate() const;
};

struct SyntheticCity {
  std::vector<StationRecord> stations;
  std::vector<FeatureSite> sites;
  ScalarField aux_aqi;  // API-style second AQI grid
};

// Mean of the present readings.
double average_station_aqi(const StationRecord& rec);

// Fills every missing reading with the median of same-hour readings at
// stations within radius_km (great-circle). Present readings are never
// altered; medians are taken over the original data only, so the result is
// independent of station order. Even-count median = midpoint of the two
// middle values.
std::vector<StationRecord> impute_missing(const std::vector<StationRecord>& records,
                                          double radius_km);

// (v - min) / (max - min); degenerate range maps everything to 0.
std::vector<double> minmax_normalize(const std::vector<double>& values);

// Inverse distance weighting with p = 2, distances in cell units between the
// integer cell lattice and the stations' continuous cell-space positions.
// A cell closer than 1e-9 cells to a station takes that station's value.
ScalarField idw_interpolate(const std::vector<std::pair<GeoPoint, double>>& stations,
                            const GridSpec& spec);

// Elementwise max of two AQI fields.
ScalarField fuse_max(const ScalarField& a, const ScalarField& b);

SyntheticCity generate_synthetic_city(const SyntheticCityConfig& cfg,
                                      const GridSpec& spec);

// Station CSV: header station_id,lat,lon,hour,aqi; empty aqi field = missing.
std::string stations_to_csv(const std::vector<StationRecord>& records);
std::vector<StationRecord> stations_from_csv(const std::string& text,
                                             const std::string& origin);
void write_stations(const std::vector<StationRecord>& records, const std::string& path);
std::vector<StationRecord> read_stations(const std::string& path);

// Sites CSV: header kind,lat,lon,magnitude,radius_cells.
std::string sites_to_csv(const std::vector<FeatureSite>& sites);
std::vector<FeatureSite> sites_from_csv(const std::string& text,
                                        const std::string& origin);
void write_sites(const std::vector<FeatureSite>& sites, const std::string& path);
std::vector<FeatureSite> read_sites(const std::string& path);

}  // namespace aerogrid::ingest
