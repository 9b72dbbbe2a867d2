#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "aerogrid/errors.hpp"

namespace aerogrid {

struct GridSpec {
  int width = 50;
  int height = 50;
  double lat_min = 28.40;
  double lat_max = 28.90;
  double lon_min = 76.80;
  double lon_max = 77.40;

  bool operator==(const GridSpec&) const = default;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  void validate() const;

  // Physical cell spacing (km per row step, km per column step) at the grid
  // middle. Derived quantity only; no formula in the pipeline consumes it.
  std::pair<double, double> cell_size_km() const;
};

// x is the row (latitude) index in [0, height); y the column (longitude)
// index in [0, width).
struct CellIndex {
  int x = 0;
  int y = 0;
  bool operator==(const CellIndex&) const = default;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

void validate_geo(const GeoPoint& p);

enum class Channel { AQI, Population, Traffic, Industrial, Green, Booth };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);

inline std::size_t flat_index(const GridSpec& spec, CellIndex c) {
  return static_cast<std::size_t>(c.x) * static_cast<std::size_t>(spec.width) +
         static_cast<std::size_t>(c.y);
}

inline CellIndex cell_from_flat(const GridSpec& spec, std::size_t i) {
  return CellIndex{static_cast<int>(i / static_cast<std::size_t>(spec.width)),
                   static_cast<int>(i % static_cast<std::size_t>(spec.width))};
}

inline bool in_bounds(const GridSpec& spec, CellIndex c) {
  return c.x >= 0 && c.x < spec.height && c.y >= 0 && c.y < spec.width;
}

// One channel over the grid, row-major. Construction enforces the channel's
// value range: AQI in [0,500], influence channels in [0,1], booth in {0,1}.
class ScalarField {
 public:
  ScalarField(GridSpec spec, Channel channel, std::vector<double> values);
  static ScalarField zeros(GridSpec spec, Channel channel);
  static ScalarField constant(GridSpec spec, Channel channel, double value);

  const GridSpec& spec() const { return spec_; }
  Channel channel() const { return channel_; }
  const std::vector<double>& values() const { return values_; }

  double at(CellIndex c) const;
  double at_flat(std::size_t i) const { return values_[i]; }

  // Copy-and-replace mutation; the new values are revalidated.
  ScalarField with_values(std::vector<double> values) const;

  double mean() const;
  double max() const;
  double sum() const;

 private:
  GridSpec spec_;
  Channel channel_;
  std::vector<double> values_;
};

// The stacked observation: five data channels plus the booth grid, all on one
// GridSpec.
struct EnvState {
  ScalarField aqi;
  ScalarField population;
  ScalarField traffic;
  ScalarField industrial;
  ScalarField green;
  ScalarField booth;

  EnvState(ScalarField aqi, ScalarField population, ScalarField traffic,
           ScalarField industrial, ScalarField green, ScalarField booth);

  const GridSpec& spec() const { return aqi.spec(); }
};

GeoPoint cell_to_geo(const GridSpec& spec, CellIndex cell);
CellIndex geo_to_cell(const GridSpec& spec, GeoPoint p);

// Continuous cell-space position of a geographic point (row, col), used by
// interpolation; geo_to_cell is its rounding.
std::pair<double, double> geo_to_cell_continuous(const GridSpec& spec, GeoPoint p);

double euclidean_cells(CellIndex a, CellIndex b);

// Great-circle distance, Earth radius 6371.0 km.
double haversine_km(GeoPoint a, GeoPoint b);

}  // namespace aerogrid
