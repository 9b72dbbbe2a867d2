#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "aerogrid/booth.hpp"
#include "doctest.h"

using namespace aerogrid;
using booth::BoothParams;
using booth::ConstraintSet;
using booth::Placement;
using booth::StrategyKind;
using booth::ViolationKind;

namespace {

GridSpec small_spec(int n) {
  GridSpec spec;
  spec.width = n;
  spec.height = n;
  return spec;
}

ScalarField uniform(const GridSpec& spec, Channel c, double v) {
  return ScalarField(spec, c, std::vector<double>(spec.cell_count(), v));
}

// Uniform state: AQI 500, population 1, everything else empty.
EnvState plain_state(const GridSpec& spec) {
  return EnvState(uniform(spec, Channel::AQI, 500.0),
                  uniform(spec, Channel::Population, 1.0),
                  ScalarField::zeros(spec, Channel::Traffic),
                  ScalarField::zeros(spec, Channel::Industrial),
                  ScalarField::zeros(spec, Channel::Green),
                  ScalarField::zeros(spec, Channel::Booth));
}

EnvState with_field(const EnvState& s, const ScalarField& f) {
  auto pick = [&](Channel c, const ScalarField& cur) {
    return f.channel() == c ? f : cur;
  };
  return EnvState(pick(Channel::AQI, s.aqi), pick(Channel::Population, s.population),
                  pick(Channel::Traffic, s.traffic),
                  pick(Channel::Industrial, s.industrial),
                  pick(Channel::Green, s.green), pick(Channel::Booth, s.booth));
}

bool has_kind(const std::vector<booth::ConstraintViolation>& vs, ViolationKind k) {
  return std::any_of(vs.begin(), vs.end(),
                     [&](const auto& v) { return v.kind == k && v.flag; });
}

}  // namespace

TEST_CASE("booth effect follows the gaussian dampening formula") {
  auto spec = small_spec(11);
  auto aqi = uniform(spec, Channel::AQI, 500.0);
  BoothParams p;  // alpha 0.6, sigma 2
  CellIndex at{5, 5};
  auto after = booth::apply_booth_effect(aqi, at, p);

  CHECK(after.at({5, 5}) == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(after.at({5, 6}) == doctest::Approx(235.2509292246214).epsilon(1e-12));
  CHECK(after.at({5, 7}) == doctest::Approx(318.04080208621).epsilon(1e-12));
  CHECK(after.at({5, 10}) == doctest::Approx(486.8189199129778).epsilon(1e-12));
  // d = 5 via a 3-4-5 triangle matches the axis-aligned d = 5 value
  CHECK(after.at({8, 9}) == doctest::Approx(after.at({5, 10})).epsilon(1e-12));

  // whole-grid check against the closed form
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      double d2 = euclidean_cells({x, y}, at);
      d2 *= d2;
      double expect = 500.0 * (1.0 - p.alpha * std::exp(-d2 / (2.0 * p.sigma_booth *
                                                               p.sigma_booth)));
      CHECK(after.at({x, y}) == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(booth::apply_booth_effect(aqi, {11, 0}, p), DomainError);
  BoothParams bad;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(booth::apply_booth_effect(aqi, at, bad), ValidationError);
  bad.alpha = 0.6;
  bad.sigma_booth = 0.0;
  CHECK_THROWS_AS(booth::apply_booth_effect(aqi, at, bad), ValidationError);
}

TEST_CASE("booth effects never increase AQI anywhere") {
  auto spec = small_spec(9);
  std::vector<double> values(spec.cell_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = 20.0 + static_cast<double>(i % 37) * 12.0;
  }
  ScalarField aqi(spec, Channel::AQI, values);
  BoothParams p;
  auto after = booth::apply_booth_effect(aqi, {4, 4}, p);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(after.values()[i] <= aqi.values()[i]);
    CHECK(after.values()[i] >= 0.0);
  }
}

TEST_CASE("stacked booths multiply, so placement order cannot matter") {
  auto spec = small_spec(9);
  auto aqi = uniform(spec, Channel::AQI, 400.0);
  BoothParams p;
  Placement fwd;
  fwd.cells = {{1, 1}, {4, 6}, {7, 2}, {3, 3}};
  Placement rev;
  rev.cells = {{3, 3}, {7, 2}, {4, 6}, {1, 1}};

  auto a = booth::apply_all(aqi, fwd, p);
  auto b = booth::apply_all(aqi, rev, p);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    CHECK(a.values()[i] == doctest::Approx(b.values()[i]).epsilon(1e-12));
  }

  // two booths on one cell stack multiplicatively
  Placement twice;
  twice.cells = {{4, 4}, {4, 4}};
  auto stacked = booth::apply_all(aqi, twice, p);
  CHECK(stacked.at({4, 4}) == doctest::Approx(400.0 * 0.4 * 0.4).epsilon(1e-12));
}

TEST_CASE("expected improvement is the local AQI times alpha") {
  auto spec = small_spec(3);
  ScalarField aqi(spec, Channel::AQI,
                  {100.0, 50.0, 0.0, 400.0, 16.0, 250.0, 30.0, 10.0, 500.0});
  BoothParams p;
  CHECK(booth::expected_improvement(aqi, {0, 0}, p) == doctest::Approx(60.0));
  CHECK(booth::expected_improvement(aqi, {0, 2}, p) == 0.0);
  CHECK(booth::expected_improvement(aqi, {2, 2}, p) == doctest::Approx(300.0));
}

TEST_CASE("cell validity gates fire one by one") {
  auto spec = small_spec(8);
  auto state = plain_state(spec);
  ConstraintSet c;  // d_min 1 km, rho_min 0.2, delta 10, green 0.5, max 70
  BoothParams p;
  Placement none;

  auto [ok, vs] = booth::is_valid_cell(state, {3, 3}, none, c, p);
  CHECK(ok);
  CHECK(vs.empty());

  SUBCASE("existing booth on the same cell reads as zero separation") {
    Placement here;
    here.cells = {{3, 3}};
    auto [valid, violations] = booth::is_valid_cell(state, {3, 3}, here, c, p);
    CHECK(!valid);
    CHECK(has_kind(violations, ViolationKind::Distance));
    CHECK(violations.size() == 1);
  }

  SUBCASE("a neighbor closer than d_min trips the distance gate") {
    ConstraintSet wide = c;
    wide.d_min_km = 10.0;  // adjacent cells on this coarse grid are ~8 km apart
    Placement near;
    near.cells = {{3, 4}};
    auto [valid, violations] = booth::is_valid_cell(state, {3, 3}, near, c, p);
    CHECK(valid);  // 1 km default: adjacent is far enough
    auto [valid2, violations2] = booth::is_valid_cell(state, {3, 3}, near, wide, p);
    CHECK(!valid2);
    CHECK(has_kind(violations2, ViolationKind::Distance));
  }

  SUBCASE("a marked booth grid cell is blocked even without a placement") {
    auto booth_grid = ScalarField::zeros(spec, Channel::Booth);
    auto vals = booth_grid.values();
    vals[flat_index(spec, {3, 3})] = 1.0;
    auto marked = with_field(state, booth_grid.with_values(std::move(vals)));
    auto [valid, violations] = booth::is_valid_cell(marked, {3, 3}, none, c, p);
    CHECK(!valid);
    CHECK(has_kind(violations, ViolationKind::Distance));
  }

  SUBCASE("population at or below rho_min is insufficient") {
    auto pop = uniform(spec, Channel::Population, 0.2);  // equal: still invalid
    auto sparse = with_field(state, pop);
    auto [valid, violations] = booth::is_valid_cell(sparse, {3, 3}, none, c, p);
    CHECK(!valid);
    CHECK(has_kind(violations, ViolationKind::Population));
  }

  SUBCASE("too little headroom trips the improvement gate") {
    auto aqi = uniform(spec, Channel::AQI, 16.0);  // 16 * 0.6 = 9.6 < 10
    auto clean = with_field(state, aqi);
    auto [valid, violations] = booth::is_valid_cell(clean, {3, 3}, none, c, p);
    CHECK(!valid);
    CHECK(has_kind(violations, ViolationKind::ImprovementPotential));
    // 17 * 0.6 = 10.2 >= 10 passes
    auto ok_aqi = with_field(state, uniform(spec, Channel::AQI, 17.0));
    CHECK(booth::is_valid_cell(ok_aqi, {3, 3}, none, c, p).first);
  }

  SUBCASE("green cover strictly above the threshold is protected") {
    auto at_limit = with_field(state, uniform(spec, Channel::Green, 0.5));
    CHECK(booth::is_valid_cell(at_limit, {3, 3}, none, c, p).first);
    auto lush = with_field(state, uniform(spec, Channel::Green, 0.51));
    auto [valid, violations] = booth::is_valid_cell(lush, {3, 3}, none, c, p);
    CHECK(!valid);
    CHECK(has_kind(violations, ViolationKind::Greenspace));
  }

  SUBCASE("a full budget blocks every further cell") {
    ConstraintSet tight = c;
    tight.max_booths = 2;
    Placement two;
    two.cells = {{0, 0}, {7, 7}};
    auto [valid, violations] = booth::is_valid_cell(state, {3, 3}, two, tight, p);
    CHECK(!valid);
    CHECK(has_kind(violations, ViolationKind::MaxBooths));
  }

  CHECK_THROWS_AS(booth::is_valid_cell(state, {8, 0}, none, c, p), DomainError);
}

TEST_CASE("audits count violations per kind at each booth's own step") {
  auto spec = small_spec(8);
  auto state = plain_state(spec);
  ConstraintSet c;
  c.max_booths = 2;
  BoothParams p;

  Placement stacked;
  stacked.cells = {{0, 0}, {0, 0}, {0, 0}};
  auto counts = booth::audit_placement(state, stacked, c, p);
  // kinds in order: distance, greenspace, max_booths, population, improvement
  CHECK(counts == std::array<int, 5>{2, 0, 1, 0, 0});

  Placement spread;
  spread.cells = {{0, 0}, {7, 7}};
  CHECK(booth::audit_placement(state, spread, c, p) ==
        std::array<int, 5>{0, 0, 0, 0, 0});

  // a huge improvement floor makes every booth a violation
  ConstraintSet strict = c;
  strict.delta_aqi_min = 1000.0;
  CHECK(booth::audit_placement(state, spread, strict, p) ==
        std::array<int, 5>{0, 0, 0, 0, 2});
}

TEST_CASE("constraint and parameter validation reject bad values") {
  ConstraintSet c;
  CHECK_NOTHROW(c.validate());
  c.max_booths = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.max_booths = 70;
  c.d_min_km = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);

  BoothParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("strategy names round trip") {
  for (auto s : {StrategyKind::Random, StrategyKind::Greedy, StrategyKind::PPO}) {
    CHECK(booth::strategy_from_name(booth::strategy_name(s)) == s);
  }
  CHECK_THROWS_AS(booth::strategy_from_name("oracle"), DomainError);
}

TEST_CASE("placement JSON round trips and carries geography") {
  auto spec = small_spec(8);
  Placement p;
  p.strategy = StrategyKind::Greedy;
  p.cells = {{0, 0}, {3, 5}, {7, 7}};
  std::string text = booth::placement_to_json(p, spec);
  CHECK(text.find("\"strategy\"") != std::string::npos);
  CHECK(text.find("\"booths\"") != std::string::npos);
  CHECK(text.find("\"lat\"") != std::string::npos);
  CHECK(text.find("\"step\"") != std::string::npos);

  auto back = booth::placement_from_json(text, "mem");
  CHECK(back.strategy == StrategyKind::Greedy);
  REQUIRE(back.cells.size() == 3);
  CHECK(back.cells[1] == CellIndex{3, 5});
  CHECK(back.contains({7, 7}));
  CHECK(!back.contains({1, 1}));

  CHECK_THROWS_AS(booth::placement_from_json("{not json", "mem"), ValidationError);
  CHECK_THROWS_AS(booth::placement_from_json("{\"booths\": 3}", "mem"),
                  ValidationError);

  auto path = (std::filesystem::temp_directory_path() / "aerogrid_booth_rt.json")
                  .string();
  booth::write_placement(p, spec, path);
  auto from_disk = booth::read_placement(path);
  CHECK(from_disk.cells == p.cells);
  std::remove(path.c_str());
}
