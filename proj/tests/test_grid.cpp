#include <cmath>
#include <vector>

#include "aerogrid/grid.hpp"
#include "doctest.h"

using namespace aerogrid;

TEST_CASE("grid spec validation") {
  GridSpec spec;
  CHECK_NOTHROW(spec.validate());
  CHECK(spec.cell_count() == 2500);

  GridSpec tiny = spec;
  tiny.width = 1;
  CHECK_THROWS_AS(tiny.validate(), ValidationError);
  GridSpec flipped = spec;
  flipped.lat_min = flipped.lat_max;
  CHECK_THROWS_AS(flipped.validate(), ValidationError);
}

TEST_CASE("cell_to_geo corners and interior") {
  GridSpec spec;
  GeoPoint lower = cell_to_geo(spec, {0, 0});
  CHECK(lower.lat == doctest::Approx(28.40).epsilon(1e-14));
  CHECK(lower.lon == doctest::Approx(76.80).epsilon(1e-14));

  GeoPoint upper = cell_to_geo(spec, {49, 49});
  CHECK(upper.lat == doctest::Approx(28.90).epsilon(1e-14));
  CHECK(upper.lon == doctest::Approx(77.40).epsilon(1e-14));

  GeoPoint mid = cell_to_geo(spec, {25, 10});
  CHECK(mid.lat == doctest::Approx(28.655102040816324).epsilon(1e-14));
  CHECK(mid.lon == doctest::Approx(76.92244897959184).epsilon(1e-13));

  CHECK_THROWS_AS(cell_to_geo(spec, {50, 0}), DomainError);
  CHECK_THROWS_AS(cell_to_geo(spec, {0, -1}), DomainError);
}

TEST_CASE("cell_to_geo is affine in the index") {
  GridSpec spec;
  double step = cell_to_geo(spec, {1, 0}).lat - cell_to_geo(spec, {0, 0}).lat;
  for (int x = 1; x + 1 < spec.height; ++x) {
    double d = cell_to_geo(spec, {x + 1, 0}).lat - cell_to_geo(spec, {x, 0}).lat;
    CHECK(d == doctest::Approx(step).epsilon(1e-10));
  }
}

TEST_CASE("geo_to_cell inverts cell_to_geo on every cell") {
  GridSpec spec;
  spec.width = 13;
  spec.height = 9;
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      CellIndex cell = geo_to_cell(spec, cell_to_geo(spec, {x, y}));
      CHECK(cell == CellIndex{x, y});
    }
  }
}

TEST_CASE("geo_to_cell rounds to the nearest center") {
  GridSpec spec;
  CHECK(geo_to_cell(spec, {28.40, 76.80}) == CellIndex{0, 0});
  // (28.651, 77.101): continuous position (24.598, 24.5817) rounds to (25, 25)
  CHECK(geo_to_cell(spec, {28.651, 77.101}) == CellIndex{25, 25});
  CHECK_THROWS_AS(geo_to_cell(spec, {28.0, 76.9}), DomainError);
  CHECK_THROWS_AS(geo_to_cell(spec, {28.5, 78.0}), DomainError);
}

TEST_CASE("euclidean distance in cell units") {
  CHECK(euclidean_cells({0, 0}, {0, 0}) == 0.0);
  CHECK(euclidean_cells({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(euclidean_cells({2, 7}, {11, 1}) ==
        doctest::Approx(10.816653826391969).epsilon(1e-15));
}

TEST_CASE("haversine over the default box") {
  CHECK(haversine_km({28.40, 76.80}, {28.40, 76.80}) == 0.0);
  CHECK(haversine_km({28.40, 76.80}, {28.90, 77.40}) ==
        doctest::Approx(80.74002445596734).epsilon(1e-12));
  CHECK(haversine_km({28.40, 76.80}, {28.90, 76.80}) ==
        doctest::Approx(55.59746332227937).epsilon(1e-12));
  // symmetry
  CHECK(haversine_km({28.5, 77.0}, {28.7, 77.2}) ==
        haversine_km({28.7, 77.2}, {28.5, 77.0}));
}

TEST_CASE("flat index round trip") {
  GridSpec spec;
  spec.width = 7;
  spec.height = 5;
  std::size_t next = 0;
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      CHECK(flat_index(spec, {x, y}) == next);
      CHECK(cell_from_flat(spec, next) == CellIndex{x, y});
      ++next;
    }
  }
}

TEST_CASE("scalar field range enforcement") {
  GridSpec spec;
  spec.width = 2;
  spec.height = 2;
  CHECK_NOTHROW(ScalarField(spec, Channel::AQI, {0.0, 250.0, 500.0, 1.0}));
  CHECK_THROWS_AS(ScalarField(spec, Channel::AQI, {0.0, 501.0, 0.0, 0.0}),
                  ValidationError);
  CHECK_THROWS_AS(ScalarField(spec, Channel::AQI, {-1.0, 0.0, 0.0, 0.0}),
                  ValidationError);
  CHECK_THROWS_AS(ScalarField(spec, Channel::Population, {0.0, 1.1, 0.0, 0.0}),
                  ValidationError);
  CHECK_THROWS_AS(ScalarField(spec, Channel::Booth, {0.0, 0.5, 0.0, 0.0}),
                  ValidationError);
  CHECK_NOTHROW(ScalarField(spec, Channel::Booth, {0.0, 1.0, 1.0, 0.0}));
  double nan = std::nan("");
  CHECK_THROWS_AS(ScalarField(spec, Channel::AQI, {nan, 0.0, 0.0, 0.0}),
                  ValidationError);
  CHECK_THROWS_AS(ScalarField(spec, Channel::AQI, {0.0, 0.0}), DomainError);
}

TEST_CASE("scalar field aggregates") {
  GridSpec spec;
  spec.width = 2;
  spec.height = 2;
  ScalarField f(spec, Channel::AQI, {10.0, 20.0, 30.0, 40.0});
  CHECK(f.mean() == doctest::Approx(25.0));
  CHECK(f.max() == 40.0);
  CHECK(f.sum() == doctest::Approx(100.0));
  CHECK(f.at({1, 0}) == 30.0);
  CHECK_THROWS_AS(f.at({2, 0}), DomainError);
}

TEST_CASE("env state requires one shared grid") {
  GridSpec spec;
  spec.width = 2;
  spec.height = 2;
  GridSpec other = spec;
  other.width = 3;
  auto field = [&](Channel c) { return ScalarField::zeros(spec, c); };
  CHECK_NOTHROW(EnvState(field(Channel::AQI), field(Channel::Population),
                         field(Channel::Traffic), field(Channel::Industrial),
                         field(Channel::Green), field(Channel::Booth)));
  CHECK_THROWS_AS(EnvState(field(Channel::AQI), field(Channel::Population),
                           field(Channel::Traffic), field(Channel::Industrial),
                           ScalarField::zeros(other, Channel::Green),
                           field(Channel::Booth)),
                  DomainError);
  // channel slots are checked, not just specs
  CHECK_THROWS_AS(EnvState(field(Channel::Population), field(Channel::AQI),
                           field(Channel::Traffic), field(Channel::Industrial),
                           field(Channel::Green), field(Channel::Booth)),
                  DomainError);
}

TEST_CASE("cell size is a derived diagnostic") {
  GridSpec spec;
  auto [row_km, col_km] = spec.cell_size_km();
  // 0.5 deg of latitude over 49 steps is about 1.13 km per row and
  // 0.6 deg of longitude over 49 steps is about 1.19 km per column here
  CHECK(row_km == doctest::Approx(1.135).epsilon(0.01));
  CHECK(col_km == doctest::Approx(1.19).epsilon(0.02));
}
