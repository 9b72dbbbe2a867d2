#include "aerogrid/booth.hpp"

#include <algorithm>
#include <cmath>

#include "aerogrid/io.hpp"
#include "json.hpp"

namespace aerogrid::booth {

void BoothParams::validate() const {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0) {
    throw ValidationError("booth alpha must lie in (0, 1)");
  }
  if (!std::isfinite(sigma_booth) || sigma_booth <= 0.0) {
    throw ValidationError("booth sigma must be > 0");
  }
}

void ConstraintSet::validate() const {
  if (!std::isfinite(d_min_km) || d_min_km < 0.0 || !std::isfinite(rho_min) ||
      rho_min < 0.0 || !std::isfinite(delta_aqi_min) || delta_aqi_min < 0.0 ||
      !std::isfinite(green_threshold) || green_threshold < 0.0) {
    throw ValidationError("constraint thresholds must be finite and >= 0");
  }
  if (max_booths < 1) throw ValidationError("max_booths must be >= 1");
}

const char* strategy_name(StrategyKind s) {
  switch (s) {
    case StrategyKind::Random: return "random";
    case StrategyKind::Greedy: return "greedy";
    case StrategyKind::PPO: return "ppo";
  }
  throw DomainError("unknown strategy");
}

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "random") return StrategyKind::Random;
  if (name == "greedy") return StrategyKind::Greedy;
  if (name == "ppo") return StrategyKind::PPO;
  throw DomainError("unknown strategy name: " + name);
}

bool Placement::contains(CellIndex c) const {
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

const char* violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Distance: return "distance";
    case ViolationKind::Greenspace: return "greenspace";
    case ViolationKind::MaxBooths: return "max_booths";
    case ViolationKind::Population: return "population";
    case ViolationKind::ImprovementPotential: return "improvement";
  }
  throw DomainError("unknown violation kind");
}

ScalarField apply_booth_effect(const ScalarField& aqi, CellIndex booth_cell,
                               const BoothParams& p) {
  p.validate();
  if (!in_bounds(aqi.spec(), booth_cell)) {
    throw DomainError("booth cell outside grid");
  }
  const GridSpec& spec = aqi.spec();
  std::vector<double> out(aqi.values());
  double two_sigma2 = 2.0 * p.sigma_booth * p.sigma_booth;
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      double d = euclidean_cells({x, y}, booth_cell);
      double factor = 1.0 - p.alpha * std::exp(-(d * d) / two_sigma2);
      out[flat_index(spec, {x, y})] *= factor;
    }
  }
  return aqi.with_values(std::move(out));
}

ScalarField apply_all(const ScalarField& aqi, const Placement& placement,
                      const BoothParams& p) {
  ScalarField out = aqi;
  for (CellIndex c : placement.cells) {
    out = apply_booth_effect(out, c, p);
  }
  return out;
}

double expected_improvement(const ScalarField& aqi, CellIndex cell,
                            const BoothParams& p) {
  p.validate();
  return aqi.at(cell) * p.alpha;
}

std::pair<bool, std::vector<ConstraintViolation>> is_valid_cell(
    const EnvState& state, CellIndex cell, const Placement& existing,
    const ConstraintSet& c, const BoothParams& p) {
  c.validate();
  p.validate();
  if (!in_bounds(state.spec(), cell)) throw DomainError("cell outside grid");

  std::vector<ConstraintViolation> violations;
  auto flag = [&](ViolationKind k) {
    for (const auto& v : violations) {
      if (v.kind == k) return;
    }
    violations.push_back(ConstraintViolation{k, 1.0, true});
  };

  GeoPoint here = cell_to_geo(state.spec(), cell);
  for (CellIndex b : existing.cells) {
    if (b == cell) {
      flag(ViolationKind::Distance);  // zero separation
      continue;
    }
    if (haversine_km(here, cell_to_geo(state.spec(), b)) < c.d_min_km) {
      flag(ViolationKind::Distance);
    }
  }
  if (state.booth.at(cell) != 0.0 && !existing.contains(cell)) {
    flag(ViolationKind::Distance);
  }
  if (!(state.population.at(cell) > c.rho_min)) flag(ViolationKind::Population);
  if (expected_improvement(state.aqi, cell, p) < c.delta_aqi_min) {
    flag(ViolationKind::ImprovementPotential);
  }
  if (state.green.at(cell) > c.green_threshold) flag(ViolationKind::Greenspace);
  if (static_cast<int>(existing.size()) >= c.max_booths) flag(ViolationKind::MaxBooths);

  return {violations.empty(), violations};
}

std::array<int, 5> audit_placement(const EnvState& initial, const Placement& placement,
                                   const ConstraintSet& c, const BoothParams& p) {
  std::array<int, 5> counts{};
  ScalarField aqi = initial.aqi;
  std::vector<double> booth_vals(initial.spec().cell_count(), 0.0);
  Placement placed{placement.strategy, {}};
  for (CellIndex cell : placement.cells) {
    EnvState snapshot(aqi, initial.population, initial.traffic, initial.industrial,
                      initial.green,
                      ScalarField(initial.spec(), Channel::Booth, booth_vals));
    auto [ok, violations] = is_valid_cell(snapshot, cell, placed, c, p);
    for (const auto& v : violations) {
      counts[static_cast<std::size_t>(v.kind)] += 1;
    }
    aqi = apply_booth_effect(aqi, cell, p);
    booth_vals[flat_index(initial.spec(), cell)] = 1.0;
    placed.cells.push_back(cell);
  }
  return counts;
}

std::string placement_to_json(const Placement& placement, const GridSpec& spec) {
  nlohmann::ordered_json j;
  j["strategy"] = strategy_name(placement.strategy);
  j["booths"] = nlohmann::ordered_json::array();
  int step = 0;
  for (CellIndex c : placement.cells) {
    GeoPoint g = cell_to_geo(spec, c);
    j["booths"].push_back({{"x", c.x}, {"y", c.y}, {"lat", g.lat}, {"lon", g.lon},
                           {"step", step}});
    ++step;
  }
  return j.dump(2) + "\n";
}

Placement placement_from_json(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": invalid placement JSON: " + e.what());
  }
  Placement out;
  try {
    out.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    for (const auto& b : j.at("booths")) {
      out.cells.push_back(CellIndex{b.at("x").get<int>(), b.at("y").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": malformed placement JSON: " + e.what());
  }
  return out;
}

void write_placement(const Placement& placement, const GridSpec& spec,
                     const std::string& path) {
  io::write_text_file(path, placement_to_json(placement, spec));
}

Placement read_placement(const std::string& path) {
  return placement_from_json(io::read_text_file(path), path);
}

}  // namespace aerogrid::booth
