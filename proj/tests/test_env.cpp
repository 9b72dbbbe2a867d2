#include <cmath>
#include <sstream>
#include <vector>

#include "aerogrid/env.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace aerogrid;
using booth::ConstraintViolation;
using booth::Placement;
using booth::ViolationKind;
using env::BoothEnv;
using env::EpisodeConfig;
using env::RewardWeights;

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

EnvState uniform_state(const GridSpec& spec, double aqi, double pop,
                       double traffic = 0.0, double industrial = 0.0,
                       double green = 0.0) {
  return EnvState(uniform(spec, Channel::AQI, aqi),
                  uniform(spec, Channel::Population, pop),
                  uniform(spec, Channel::Traffic, traffic),
                  uniform(spec, Channel::Industrial, industrial),
                  uniform(spec, Channel::Green, green),
                  ScalarField::zeros(spec, Channel::Booth));
}

// A deliberately uneven city so masks are nontrivial.
EnvState patterned_state(const GridSpec& spec) {
  std::size_t n = spec.cell_count();
  std::vector<double> aqi(n), pop(n), traffic(n), industrial(n), green(n);
  for (std::size_t i = 0; i < n; ++i) {
    aqi[i] = 15.0 + static_cast<double>((i * 13) % 40) * 12.0;
    pop[i] = static_cast<double>(i % 3) / 2.0;
    traffic[i] = static_cast<double>((i * 5) % 7) / 6.0;
    industrial[i] = static_cast<double>((i * 11) % 5) / 4.0;
    green[i] = static_cast<double>((i * 7) % 10) / 10.0;
  }
  return EnvState(ScalarField(spec, Channel::AQI, aqi),
                  ScalarField(spec, Channel::Population, pop),
                  ScalarField(spec, Channel::Traffic, traffic),
                  ScalarField(spec, Channel::Industrial, industrial),
                  ScalarField(spec, Channel::Green, green),
                  ScalarField::zeros(spec, Channel::Booth));
}

}  // namespace

TEST_CASE("reward components follow the composite formula") {
  auto spec = small_spec(11);
  auto state = uniform_state(spec, 500.0, 1.0, 0.5, 0.25);
  booth::BoothParams p;  // alpha 0.6, sigma 2
  CellIndex cell{5, 5};
  auto before = state.aqi;
  auto after = booth::apply_booth_effect(before, cell, p);

  RewardWeights w;
  double radius = 6.0;  // 3 sigma
  auto [total, b] =
      env::compute_reward(before, after, cell, state, w, {}, radius, 0.1, 0.01);

  // local drop at the booth: 500 -> 200
  CHECK(b.r_local == doctest::Approx(0.6).epsilon(1e-12));

  // global term recomputed from scratch
  double mean_drop = 0.0;
  for (std::size_t i = 0; i < before.values().size(); ++i) {
    mean_drop += before.values()[i] - after.values()[i];
  }
  mean_drop /= static_cast<double>(before.values().size());
  CHECK(b.r_global == doctest::Approx(mean_drop / 500.0).epsilon(1e-12));

  // neighborhood terms recomputed from scratch
  double sum_drop = 0.0;
  int n_cells = 0;
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      if (euclidean_cells({x, y}, cell) > radius) continue;
      sum_drop += before.at({x, y}) - after.at({x, y});
      ++n_cells;
    }
  }
  double r_pop_expect = sum_drop / (500.0 * n_cells);
  CHECK(b.r_population == doctest::Approx(r_pop_expect).epsilon(1e-12));
  // uniform half-density traffic and quarter-density industry scale linearly
  CHECK(b.r_traffic == doctest::Approx(0.5 * r_pop_expect).epsilon(1e-12));
  CHECK(b.r_industrial == doctest::Approx(0.25 * r_pop_expect).epsilon(1e-12));
  CHECK(b.penalty == 0.0);

  // the scalar reward reassembles from the breakdown
  double expect = (w.w_local * b.r_local + w.w_global * b.r_global +
                   w.w_population * b.r_population + w.w_traffic * b.r_traffic +
                   w.w_industrial * b.r_industrial + b.penalty) *
                      0.1 -
                  0.01;
  CHECK(total == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("violations feed the penalty term with their own weights") {
  auto spec = small_spec(5);
  auto state = uniform_state(spec, 500.0, 1.0);
  booth::BoothParams p;
  auto after = booth::apply_booth_effect(state.aqi, {2, 2}, p);

  std::vector<ConstraintViolation> violations = {
      {ViolationKind::Distance, 1.0, true},
      {ViolationKind::Greenspace, 1.0, true},
      {ViolationKind::Population, 1.0, false},  // unflagged: ignored
  };
  RewardWeights w;
  w.penalty_distance = 2.5;
  w.penalty_greenspace = 0.5;
  auto [total, b] = env::compute_reward(state.aqi, after, {2, 2}, state, w,
                                        violations, 6.0, 1.0, 0.0);
  CHECK(b.penalty == doctest::Approx(-3.0));

  auto other_spec = small_spec(4);
  auto mismatched = uniform(other_spec, Channel::AQI, 100.0);
  CHECK_THROWS_AS(env::compute_reward(mismatched, after, {2, 2}, state, w, {},
                                      6.0, 1.0, 0.0),
                  DomainError);
}

TEST_CASE("action mask agrees with per-cell validity checks") {
  auto spec = small_spec(8);
  auto state = patterned_state(spec);
  booth::ConstraintSet c;
  booth::BoothParams p;
  BoothEnv env(state, c, p, RewardWeights{}, EpisodeConfig{}, 1);

  auto check_mask = [&]() {
    auto mask = env.action_mask();
    REQUIRE(mask.size() == spec.cell_count());
    int valid_count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      auto [ok, violations] = booth::is_valid_cell(
          env.state(), cell_from_flat(spec, i), env.placement(), c, p);
      CHECK(mask[i] == (ok ? 1 : 0));
      valid_count += mask[i];
    }
    return valid_count;
  };

  int before = check_mask();
  CHECK(before > 0);
  CHECK(before < static_cast<int>(spec.cell_count()));  // pattern blocks some

  // place one booth, then the mask must reflect the new state
  auto mask = env.action_mask();
  int first_valid = -1;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      first_valid = static_cast<int>(i);
      break;
    }
  }
  REQUIRE(first_valid >= 0);
  auto result = env.step(first_valid);
  CHECK(result.action_valid);
  int after = check_mask();
  CHECK(after < before);  // the taken cell left the mask
}

TEST_CASE("valid steps place booths and reward the drop") {
  auto spec = small_spec(8);
  auto state = uniform_state(spec, 500.0, 1.0);
  booth::ConstraintSet c;
  c.max_booths = 3;
  booth::BoothParams p;
  EpisodeConfig ep;
  BoothEnv env(state, c, p, RewardWeights{}, ep, 0);

  int action = static_cast<int>(flat_index(spec, {4, 4}));
  auto before_field = env.state().aqi;
  auto result = env.step(action);

  CHECK(result.action_valid);
  CHECK(result.action == action);
  CHECK(!result.done);
  CHECK(env.placement().size() == 1);
  CHECK(env.placement().cells[0] == CellIndex{4, 4});
  CHECK(env.state().booth.at({4, 4}) == 1.0);
  CHECK(env.state().aqi.at({4, 4}) == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(env.steps_taken() == 1);

  // reward matches a from-scratch recomputation
  auto after_field = booth::apply_booth_effect(before_field, {4, 4}, p);
  auto [expect, b] = env::compute_reward(
      before_field, after_field, {4, 4}, state, env.weights(), {},
      env.influence_radius_cells(), ep.reward_scaling, ep.action_penalty);
  CHECK(result.reward == doctest::Approx(expect).epsilon(1e-12));
  CHECK(result.reward > 0.0);
}

TEST_CASE("invalid steps cost a penalty and change nothing") {
  auto spec = small_spec(8);
  auto state = uniform_state(spec, 500.0, 1.0);
  booth::ConstraintSet c;
  booth::BoothParams p;
  EpisodeConfig ep;
  BoothEnv env(state, c, p, RewardWeights{}, ep, 0);

  int action = static_cast<int>(flat_index(spec, {2, 2}));
  CHECK(env.step(action).action_valid);
  auto aqi_after_first = env.state().aqi.values();

  // the same cell again: zero separation, a distance violation
  auto result = env.step(action);
  CHECK(!result.action_valid);
  CHECK(env.placement().size() == 1);
  CHECK(env.state().aqi.values() == aqi_after_first);
  CHECK(result.info.penalty == doctest::Approx(-1.0));
  CHECK(result.reward ==
        doctest::Approx(-1.0 * ep.reward_scaling - ep.action_penalty));
  CHECK(env.steps_taken() == 2);

  CHECK_THROWS_AS(env.step(-1), DomainError);
  CHECK_THROWS_AS(env.step(64), DomainError);
}

TEST_CASE("episodes end on the booth budget") {
  auto spec = small_spec(8);
  auto state = uniform_state(spec, 500.0, 1.0);
  booth::ConstraintSet c;
  c.max_booths = 2;
  BoothEnv env(state, c, booth::BoothParams{}, RewardWeights{}, EpisodeConfig{}, 0);

  CHECK(!env.step(static_cast<int>(flat_index(spec, {0, 0}))).done);
  auto last = env.step(static_cast<int>(flat_index(spec, {7, 7})));
  CHECK(last.done);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(0), DomainError);
}

TEST_CASE("episodes end when the step budget runs out") {
  auto spec = small_spec(8);
  auto state = uniform_state(spec, 500.0, 1.0);
  EpisodeConfig ep;
  ep.max_steps = 3;
  BoothEnv env(state, booth::ConstraintSet{}, booth::BoothParams{},
               RewardWeights{}, ep, 0);

  int same = static_cast<int>(flat_index(spec, {1, 1}));
  CHECK(!env.step(same).done);
  CHECK(!env.step(same).done);  // invalid repeat still burns a step
  CHECK(env.step(same).done);
}

TEST_CASE("episodes end when no valid cell remains") {
  auto spec = small_spec(8);
  // population nowhere dense enough except one cell
  std::vector<double> pop(spec.cell_count(), 0.0);
  pop[flat_index(spec, {3, 3})] = 1.0;
  auto state = EnvState(uniform(spec, Channel::AQI, 500.0),
                        ScalarField(spec, Channel::Population, pop),
                        ScalarField::zeros(spec, Channel::Traffic),
                        ScalarField::zeros(spec, Channel::Industrial),
                        ScalarField::zeros(spec, Channel::Green),
                        ScalarField::zeros(spec, Channel::Booth));
  BoothEnv env(state, booth::ConstraintSet{}, booth::BoothParams{},
               RewardWeights{}, EpisodeConfig{}, 0);

  auto mask = env.action_mask();
  int n_valid = 0;
  for (auto m : mask) n_valid += m;
  CHECK(n_valid == 1);

  auto result = env.step(static_cast<int>(flat_index(spec, {3, 3})));
  CHECK(result.action_valid);
  CHECK(result.done);  // the only valid cell is now taken
}

TEST_CASE("reset restores the base city and clears booths") {
  auto spec = small_spec(8);
  auto state = uniform_state(spec, 500.0, 1.0);
  BoothEnv env(state, booth::ConstraintSet{}, booth::BoothParams{},
               RewardWeights{}, EpisodeConfig{}, 0);
  env.step(static_cast<int>(flat_index(spec, {2, 5})));
  CHECK(env.improvement_pct() > 0.0);

  env.reset();
  CHECK(env.placement().size() == 0);
  CHECK(env.steps_taken() == 0);
  CHECK(!env.done());
  CHECK(env.state().aqi.values() == state.aqi.values());
  CHECK(env.state().booth.max() == 0.0);
  CHECK(env.improvement_pct() == 0.0);
}

TEST_CASE("improvement percentage tracks the mean AQI drop") {
  auto spec = small_spec(8);
  auto state = uniform_state(spec, 400.0, 1.0);
  BoothEnv env(state, booth::ConstraintSet{}, booth::BoothParams{},
               RewardWeights{}, EpisodeConfig{}, 0);
  env.step(static_cast<int>(flat_index(spec, {4, 4})));
  double expect =
      (state.aqi.mean() - env.state().aqi.mean()) / state.aqi.mean() * 100.0;
  CHECK(env.improvement_pct() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(env.improvement_pct() > 0.0);
}

TEST_CASE("episode traces are one JSON record per step") {
  auto spec = small_spec(8);
  auto state = uniform_state(spec, 500.0, 1.0);
  BoothEnv env(state, booth::ConstraintSet{}, booth::BoothParams{},
               RewardWeights{}, EpisodeConfig{}, 0);
  env::TraceWriter trace;

  auto r1 = env.step(static_cast<int>(flat_index(spec, {1, 2})));
  trace.record(env, r1);
  auto r2 = env.step(static_cast<int>(flat_index(spec, {1, 2})));  // invalid
  trace.record(env, r2);

  std::istringstream lines(trace.text());
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["step"] == rows);
    CHECK(j.contains("action"));
    CHECK(j.contains("x"));
    CHECK(j.contains("y"));
    CHECK(j.contains("valid"));
    CHECK(j.contains("reward"));
    CHECK(j["breakdown"].contains("r_local"));
    CHECK(j["breakdown"].contains("penalty"));
    CHECK(j.contains("mean_aqi"));
    CHECK(j.contains("done"));
    ++rows;
  }
  CHECK(rows == 2);
  auto first = nlohmann::json::parse(trace.text().substr(0, trace.text().find('\n')));
  CHECK(first["valid"] == true);
  CHECK(first["x"] == 1);
  CHECK(first["y"] == 2);
}
