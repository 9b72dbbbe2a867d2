#include "aerogrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aerogrid {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

void check_channel_value(Channel c, double v) {
  if (!std::isfinite(v)) {
    throw ValidationError(std::string(channel_name(c)) + " field holds a non-finite value");
  }
  switch (c) {
    case Channel::AQI:
      if (v < 0.0 || v > 500.0) {
        throw ValidationError("AQI value " + std::to_string(v) + " outside [0, 500]");
      }
      break;
    case Channel::Booth:
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("booth value " + std::to_string(v) + " not in {0, 1}");
      }
      break;
    default:
      if (v < 0.0 || v > 1.0) {
        throw ValidationError(std::string(channel_name(c)) + " value " +
                              std::to_string(v) + " outside [0, 1]");
      }
  }
}

}  // namespace

void GridSpec::validate() const {
  if (width < 2 || height < 2) {
    throw ValidationError("grid must be at least 2x2");
  }
  if (!(lat_min < lat_max) || !(lon_min < lon_max)) {
    throw ValidationError("grid bounding box is empty or inverted");
  }
}

std::pair<double, double> GridSpec::cell_size_km() const {
  CellIndex mid{height / 2, width / 2};
  CellIndex mid_row{mid.x + 1, mid.y};
  CellIndex mid_col{mid.x, mid.y + 1};
  if (!in_bounds(*this, mid_row)) mid_row.x -= 2;
  if (!in_bounds(*this, mid_col)) mid_col.y -= 2;
  return {haversine_km(cell_to_geo(*this, mid), cell_to_geo(*this, mid_row)),
          haversine_km(cell_to_geo(*this, mid), cell_to_geo(*this, mid_col))};
}

void validate_geo(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon) || p.lat < -90.0 ||
      p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0) {
    throw ValidationError("geographic point (" + std::to_string(p.lat) + ", " +
                          std::to_string(p.lon) + ") is out of range");
  }
}

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::AQI: return "AQI";
    case Channel::Population: return "population";
    case Channel::Traffic: return "traffic";
    case Channel::Industrial: return "industrial";
    case Channel::Green: return "green";
    case Channel::Booth: return "booth";
  }
  throw DomainError("unknown channel");
}

Channel channel_from_name(const std::string& name) {
  if (name == "AQI" || name == "aqi") return Channel::AQI;
  if (name == "population") return Channel::Population;
  if (name == "traffic") return Channel::Traffic;
  if (name == "industrial") return Channel::Industrial;
  if (name == "green") return Channel::Green;
  if (name == "booth") return Channel::Booth;
  throw DomainError("unknown channel name: " + name);
}

ScalarField::ScalarField(GridSpec spec, Channel channel, std::vector<double> values)
    : spec_(spec), channel_(channel), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.cell_count()) {
    throw DomainError("field has " + std::to_string(values_.size()) +
                      " values for a " + std::to_string(spec_.width) + "x" +
                      std::to_string(spec_.height) + " grid");
  }
  for (double v : values_) check_channel_value(channel_, v);
}

ScalarField ScalarField::zeros(GridSpec spec, Channel channel) {
  spec.validate();
  return ScalarField(spec, channel, std::vector<double>(spec.cell_count(), 0.0));
}

ScalarField ScalarField::constant(GridSpec spec, Channel channel, double value) {
  spec.validate();
  return ScalarField(spec, channel, std::vector<double>(spec.cell_count(), value));
}

double ScalarField::at(CellIndex c) const {
  if (!in_bounds(spec_, c)) {
    throw DomainError("cell (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                      ") outside " + std::to_string(spec_.width) + "x" +
                      std::to_string(spec_.height) + " grid");
  }
  return values_[flat_index(spec_, c)];
}

ScalarField ScalarField::with_values(std::vector<double> values) const {
  return ScalarField(spec_, channel_, std::move(values));
}

double ScalarField::mean() const {
  return sum() / static_cast<double>(values_.size());
}

double ScalarField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

EnvState::EnvState(ScalarField aqi_, ScalarField population_, ScalarField traffic_,
                   ScalarField industrial_, ScalarField green_, ScalarField booth_)
    : aqi(std::move(aqi_)),
      population(std::move(population_)),
      traffic(std::move(traffic_)),
      industrial(std::move(industrial_)),
      green(std::move(green_)),
      booth(std::move(booth_)) {
  const GridSpec& s = aqi.spec();
  for (const ScalarField* f : {&population, &traffic, &industrial, &green, &booth}) {
    if (!(f->spec() == s)) throw DomainError("state channels disagree on GridSpec");
  }
  auto expect = [](const ScalarField& f, Channel c) {
    if (f.channel() != c) {
      throw DomainError(std::string("state channel slot expects ") + channel_name(c) +
                        " but holds " + channel_name(f.channel()));
    }
  };
  expect(aqi, Channel::AQI);
  expect(population, Channel::Population);
  expect(traffic, Channel::Traffic);
  expect(industrial, Channel::Industrial);
  expect(green, Channel::Green);
  expect(booth, Channel::Booth);
}

GeoPoint cell_to_geo(const GridSpec& spec, CellIndex cell) {
  if (!in_bounds(spec, cell)) {
    throw DomainError("cell (" + std::to_string(cell.x) + ", " +
                      std::to_string(cell.y) + ") outside grid");
  }
  double lat = spec.lat_min +
               cell.x * (spec.lat_max - spec.lat_min) / (spec.height - 1);
  double lon = spec.lon_min +
               cell.y * (spec.lon_max - spec.lon_min) / (spec.width - 1);
  return GeoPoint{lat, lon};
}

std::pair<double, double> geo_to_cell_continuous(const GridSpec& spec, GeoPoint p) {
  if (p.lat < spec.lat_min || p.lat > spec.lat_max || p.lon < spec.lon_min ||
      p.lon > spec.lon_max) {
    throw DomainError("point (" + std::to_string(p.lat) + ", " +
                      std::to_string(p.lon) + ") outside the grid bounding box");
  }
  double row = (p.lat - spec.lat_min) / (spec.lat_max - spec.lat_min) * (spec.height - 1);
  double col = (p.lon - spec.lon_min) / (spec.lon_max - spec.lon_min) * (spec.width - 1);
  return {row, col};
}

CellIndex geo_to_cell(const GridSpec& spec, GeoPoint p) {
  auto [row, col] = geo_to_cell_continuous(spec, p);
  CellIndex c{static_cast<int>(std::lround(row)), static_cast<int>(std::lround(col))};
  c.x = std::clamp(c.x, 0, spec.height - 1);
  c.y = std::clamp(c.y, 0, spec.width - 1);
  return c;
}

double euclidean_cells(CellIndex a, CellIndex b) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double haversine_km(GeoPoint a, GeoPoint b) {
  double lat1 = deg2rad(a.lat);
  double lat2 = deg2rad(b.lat);
  double dlat = deg2rad(b.lat - a.lat);
  double dlon = deg2rad(b.lon - a.lon);
  double s = std::sin(dlat / 2.0);
  double t = std::sin(dlon / 2.0);
  double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

}  // namespace aerogrid
