#include "aerogrid/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "aerogrid/io.hpp"
#include "aerogrid/rng.hpp"

namespace aerogrid::ingest {

const char* feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::Population: return "population";
    case FeatureKind::Traffic: return "traffic";
    case FeatureKind::Industrial: return "industrial";
    case FeatureKind::Green: return "green";
  }
  throw DomainError("unknown feature kind");
}

FeatureKind feature_kind_from_name(const std::string& name) {
  if (name == "population") return FeatureKind::Population;
  if (name == "traffic") return FeatureKind::Traffic;
  if (name == "industrial") return FeatureKind::Industrial;
  if (name == "green") return FeatureKind::Green;
  throw DomainError("unknown feature kind: " + name);
}

Channel channel_of(FeatureKind k) {
  switch (k) {
    case FeatureKind::Population: return Channel::Population;
    case FeatureKind::Traffic: return Channel::Traffic;
    case FeatureKind::Industrial: return Channel::Industrial;
    case FeatureKind::Green: return Channel::Green;
  }
  throw DomainError("unknown feature kind");
}

void validate_site(const FeatureSite& s) {
  validate_geo(s.location);
  if (!std::isfinite(s.magnitude) || s.magnitude < 0.0) {
    throw ValidationError("site magnitude must be finite and >= 0");
  }
  if (!std::isfinite(s.radius_cells) || s.radius_cells <= 0.0) {
    throw ValidationError("site radius_cells must be > 0");
  }
}

void SyntheticCityConfig::validate() const {
  if (n_stations < 1 || n_pop_sites < 1 || n_traffic_sites < 1 ||
      n_industrial_sites < 1 || n_green_sites < 1) {
    throw ValidationError("synthetic city counts must all be >= 1");
  }
  if (!std::isfinite(hotspot_intensity) || hotspot_intensity < 0.0) {
    throw ValidationError("hotspot_intensity must be finite and >= 0");
  }
}

double average_station_aqi(const StationRecord& rec) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : rec.readings) {
    if (r.aqi) {
      sum += *r.aqi;
      ++n;
    }
  }
  if (n == 0) {
    throw ValidationError("station " + rec.id + " has no AQI readings to average");
  }
  return sum / n;
}

std::vector<StationRecord> impute_missing(const std::vector<StationRecord>& records,
                                          double radius_km) {
  if (!(radius_km > 0.0)) throw ValidationError("impute radius must be > 0");
  std::vector<StationRecord> out = records;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (auto& reading : out[i].readings) {
      if (reading.aqi) continue;
      std::vector<double> neighbors;
      for (std::size_t j = 0; j < records.size(); ++j) {
        if (j == i) continue;
        if (haversine_km(records[i].location, records[j].location) > radius_km) continue;
        for (const auto& other : records[j].readings) {
          if (other.hour == reading.hour && other.aqi) {
            neighbors.push_back(*other.aqi);
          }
        }
      }
      if (neighbors.empty()) {
        throw ValidationError("cannot impute station " + out[i].id + " hour " +
                              std::to_string(reading.hour) +
                              ": no neighbor within " + io::fmt_double(radius_km) +
                              " km has data");
      }
      std::sort(neighbors.begin(), neighbors.end());
      std::size_t n = neighbors.size();
      double median = (n % 2 == 1)
                          ? neighbors[n / 2]
                          : 0.5 * (neighbors[n / 2 - 1] + neighbors[n / 2]);
      reading.aqi = median;
    }
  }
  return out;
}

std::vector<double> minmax_normalize(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("cannot normalize an empty vector");
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("cannot normalize non-finite values");
  }
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  double lo = *mn, hi = *mx;
  std::vector<double> out(values.size(), 0.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[i] = (values[i] - lo) / (hi - lo);
    }
  }
  return out;
}

ScalarField idw_interpolate(const std::vector<std::pair<GeoPoint, double>>& stations,
                            const GridSpec& spec) {
  spec.validate();
  if (stations.empty()) throw ValidationError("IDW needs at least one station");
  constexpr double kSnapEps = 1e-9;  // cell units

  struct Pos { double row, col, value; };
  std::vector<Pos> pos;
  pos.reserve(stations.size());
  for (const auto& [p, v] : stations) {
    double row = (p.lat - spec.lat_min) / (spec.lat_max - spec.lat_min) * (spec.height - 1);
    double col = (p.lon - spec.lon_min) / (spec.lon_max - spec.lon_min) * (spec.width - 1);
    pos.push_back({row, col, v});
  }

  std::vector<double> values(spec.cell_count(), 0.0);
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      double num = 0.0, den = 0.0;
      double snapped = 0.0;
      bool snap = false;
      for (const auto& s : pos) {
        double dr = x - s.row, dc = y - s.col;
        double d = std::sqrt(dr * dr + dc * dc);
        if (d < kSnapEps) {
          snapped = s.value;
          snap = true;
          break;
        }
        double w = 1.0 / (d * d);
        num += w * s.value;
        den += w * 1.0;
      }
      values[flat_index(spec, {x, y})] = snap ? snapped : num / den;
    }
  }
  return ScalarField(spec, Channel::AQI, std::move(values));
}

ScalarField fuse_max(const ScalarField& a, const ScalarField& b) {
  if (!(a.spec() == b.spec())) throw DomainError("fuse_max inputs disagree on GridSpec");
  if (a.channel() != b.channel()) throw DomainError("fuse_max inputs disagree on channel");
  std::vector<double> out(a.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::max(a.values()[i], b.values()[i]);
  }
  return ScalarField(a.spec(), a.channel(), std::move(out));
}

namespace {

GeoPoint random_point_in(const GridSpec& spec, Rng& rng, double margin_frac) {
  double mlat = (spec.lat_max - spec.lat_min) * margin_frac;
  double mlon = (spec.lon_max - spec.lon_min) * margin_frac;
  return GeoPoint{rng.uniform(spec.lat_min + mlat, spec.lat_max - mlat),
                  rng.uniform(spec.lon_min + mlon, spec.lon_max - mlon)};
}

}  // namespace

SyntheticCity generate_synthetic_city(const SyntheticCityConfig& cfg,
                                      const GridSpec& spec) {
  cfg.validate();
  spec.validate();
  Rng rng(cfg.seed);
  constexpr int kHours = 24;
  constexpr double kImputeRadiusKm = 5.0;  // matches the default impute radius
  constexpr double kPi = 3.14159265358979323846;

  std::vector<StationRecord> stations;
  stations.reserve(cfg.n_stations);
  for (int i = 0; i < cfg.n_stations; ++i) {
    StationRecord rec;
    std::ostringstream id;
    id << "st_" << (i < 10 ? "0" : "") << i;
    rec.id = id.str();
    if (i > 0 && rng.next_double() < 0.5) {
      // Cluster near an earlier station so gaps stay imputable.
      const GeoPoint& anchor = stations[rng.next_below(i)].location;
      double dlat = rng.uniform(-0.02, 0.02);
      double dlon = rng.uniform(-0.02, 0.02);
      rec.location.lat = std::clamp(anchor.lat + dlat, spec.lat_min, spec.lat_max);
      rec.location.lon = std::clamp(anchor.lon + dlon, spec.lon_min, spec.lon_max);
    } else {
      rec.location = random_point_in(spec, rng, 0.02);
    }
    double base = rng.uniform(80.0, 280.0);
    double phase = rng.uniform(0.0, 24.0);
    rec.readings.reserve(kHours);
    for (int h = 0; h < kHours; ++h) {
      double v = base + 40.0 * std::sin(2.0 * kPi * (h - phase) / 24.0) +
                 rng.uniform(-15.0, 15.0);
      rec.readings.push_back({h, std::clamp(v, 0.0, 500.0)});
    }
    stations.push_back(std::move(rec));
  }

  // Knock out readings only where at least one in-radius neighbor still has
  // data at that hour, so every gap is imputable.
  for (std::size_t i = 0; i < stations.size(); ++i) {
    for (auto& reading : stations[i].readings) {
      if (rng.next_double() >= 0.08) continue;
      bool has_neighbor = false;
      for (std::size_t j = 0; j < stations.size() && !has_neighbor; ++j) {
        if (j == i) continue;
        if (haversine_km(stations[i].location, stations[j].location) > kImputeRadiusKm)
          continue;
        if (stations[j].readings[reading.hour].aqi) has_neighbor = true;
      }
      if (has_neighbor) reading.aqi.reset();
    }
  }

  std::vector<FeatureSite> sites;
  auto add_sites = [&](FeatureKind kind, int count, double mag_lo, double mag_hi) {
    for (int i = 0; i < count; ++i) {
      FeatureSite s;
      s.kind = kind;
      s.location = random_point_in(spec, rng, 0.01);
      s.magnitude = rng.uniform(mag_lo, mag_hi);
      s.radius_cells = rng.uniform(1.5, 4.0);
      sites.push_back(s);
    }
  };
  add_sites(FeatureKind::Population, cfg.n_pop_sites, 100.0, 1000.0);
  add_sites(FeatureKind::Traffic, cfg.n_traffic_sites, 1000.0, 20000.0);
  add_sites(FeatureKind::Industrial, cfg.n_industrial_sites, 10.0, 100.0);
  add_sites(FeatureKind::Green, cfg.n_green_sites, 1.0, 50.0);

  // Auxiliary API-style grid: a gentle planar background (always < 400) plus
  // one Gaussian hotspot whose peak is 150 + intensity, so the default
  // intensity 300 guarantees a >= 400 hotspot and intensity 0 stays below it.
  double b0 = rng.uniform(60.0, 130.0);
  double b1 = rng.uniform(0.0, 60.0);
  double b2 = rng.uniform(0.0, 60.0);
  int hx = rng.next_int(spec.height / 4, spec.height - 1 - spec.height / 4);
  int hy = rng.next_int(spec.width / 4, spec.width - 1 - spec.width / 4);
  double peak = std::min(500.0, 150.0 + cfg.hotspot_intensity);
  double sigma_h = std::max(2.0, std::min(spec.width, spec.height) / 8.0);
  std::vector<double> aux(spec.cell_count(), 0.0);
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      double background = b0 + b1 * static_cast<double>(x) / (spec.height - 1) +
                          b2 * static_cast<double>(y) / (spec.width - 1);
      double d2 = euclidean_cells({x, y}, {hx, hy});
      d2 *= d2;
      double bump = peak * std::exp(-d2 / (2.0 * sigma_h * sigma_h));
      aux[flat_index(spec, {x, y})] =
          std::clamp(std::max(background, bump), 0.0, 500.0);
    }
  }

  return SyntheticCity{std::move(stations), std::move(sites),
                       ScalarField(spec, Channel::AQI, std::move(aux))};
}

std::string stations_to_csv(const std::vector<StationRecord>& records) {
  std::ostringstream out;
  out << "station_id,lat,lon,hour,aqi\n";
  for (const auto& rec : records) {
    for (const auto& r : rec.readings) {
      out << rec.id << ',' << io::fmt_double(rec.location.lat) << ','
          << io::fmt_double(rec.location.lon) << ',' << r.hour << ','
          << (r.aqi ? io::fmt_double(*r.aqi) : "") << '\n';
    }
  }
  return out.str();
}

std::vector<StationRecord> stations_from_csv(const std::string& text,
                                             const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      io::split_csv_line(line) !=
          std::vector<std::string>{"station_id", "lat", "lon", "hour", "aqi"}) {
    throw ValidationError(origin + ":1: expected header 'station_id,lat,lon,hour,aqi'");
  }
  std::vector<StationRecord> records;
  std::map<std::string, std::size_t> index;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = io::split_csv_line(line);
    std::string where = origin + ":" + std::to_string(lineno);
    if (f.size() != 5) {
      throw ValidationError(where + ": expected 5 fields, got " +
                            std::to_string(f.size()));
    }
    GeoPoint loc{io::parse_double(f[1], where), io::parse_double(f[2], where)};
    validate_geo(loc);
    int hour = io::parse_int(f[3], where);
    std::optional<double> aqi;
    if (!f[4].empty()) {
      double v = io::parse_double(f[4], where);
      if (v < 0.0 || v > 500.0) {
        throw ValidationError(where + ": AQI " + f[4] + " outside [0, 500]");
      }
      aqi = v;
    }
    auto it = index.find(f[0]);
    if (it == index.end()) {
      index.emplace(f[0], records.size());
      records.push_back(StationRecord{f[0], loc, {}});
      it = index.find(f[0]);
    } else if (!(records[it->second].location == loc)) {
      throw ValidationError(where + ": station " + f[0] + " changes location mid-file");
    }
    records[it->second].readings.push_back({hour, aqi});
  }
  return records;
}

void write_stations(const std::vector<StationRecord>& records, const std::string& path) {
  io::write_text_file(path, stations_to_csv(records));
}

std::vector<StationRecord> read_stations(const std::string& path) {
  return stations_from_csv(io::read_text_file(path), path);
}

std::string sites_to_csv(const std::vector<FeatureSite>& sites) {
  std::ostringstream out;
  out << "kind,lat,lon,magnitude,radius_cells\n";
  for (const auto& s : sites) {
    out << feature_kind_name(s.kind) << ',' << io::fmt_double(s.location.lat) << ','
        << io::fmt_double(s.location.lon) << ',' << io::fmt_double(s.magnitude) << ','
        << io::fmt_double(s.radius_cells) << '\n';
  }
  return out.str();
}

std::vector<FeatureSite> sites_from_csv(const std::string& text,
                                        const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      io::split_csv_line(line) !=
          std::vector<std::string>{"kind", "lat", "lon", "magnitude", "radius_cells"}) {
    throw ValidationError(origin +
                          ":1: expected header 'kind,lat,lon,magnitude,radius_cells'");
  }
  std::vector<FeatureSite> sites;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = io::split_csv_line(line);
    std::string where = origin + ":" + std::to_string(lineno);
    if (f.size() != 5) {
      throw ValidationError(where + ": expected 5 fields, got " +
                            std::to_string(f.size()));
    }
    FeatureSite s;
    s.kind = feature_kind_from_name(f[0]);
    s.location = GeoPoint{io::parse_double(f[1], where), io::parse_double(f[2], where)};
    s.magnitude = io::parse_double(f[3], where);
    s.radius_cells = io::parse_double(f[4], where);
    try {
      validate_site(s);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    sites.push_back(s);
  }
  return sites;
}

void write_sites(const std::vector<FeatureSite>& sites, const std::string& path) {
  io::write_text_file(path, sites_to_csv(sites));
}

std::vector<FeatureSite> read_sites(const std::string& path) {
  return sites_from_csv(io::read_text_file(path), path);
}

}  // namespace aerogrid::ingest
