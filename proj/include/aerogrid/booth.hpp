#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "aerogrid/grid.hpp"

namespace aerogrid::booth {

struct BoothParams {
  double alpha = 0.6;        // peak fractional AQI reduction
  double sigma_booth = 2.0;  // Gaussian decay width, cell units
  void validate() const;
};

struct ConstraintSet {
  double d_min_km = 1.0;
  double rho_min = 0.2;
  double delta_aqi_min = 10.0;
  double green_threshold = 0.5;
  int max_booths = 70;
  void validate() const;
};

enum class StrategyKind { Random, Greedy, PPO };
const char* strategy_name(StrategyKind s);
StrategyKind strategy_from_name(const std::string& name);

struct Placement {
  StrategyKind strategy = StrategyKind::Random;
  std::vector<CellIndex> cells;

  std::size_t size() const { return cells.size(); }
  bool contains(CellIndex c) const;
};

enum class ViolationKind {
  Distance,
  Greenspace,
  MaxBooths,
  Population,
  ImprovementPotential
};
constexpr std::array<ViolationKind, 5> kAllViolationKinds = {
    ViolationKind::Distance, ViolationKind::Greenspace, ViolationKind::MaxBooths,
    ViolationKind::Population, ViolationKind::ImprovementPotential};

const char* violation_name(ViolationKind k);

struct ConstraintViolation {
  ViolationKind kind = ViolationKind::Distance;
  double weight = 1.0;  // w_c as applied by the reward; 1.0 when unweighted
  bool flag = true;     // v_c
};

// AQI * (1 - alpha * exp(-d^2 / (2 sigma^2))) at every cell, d in cell units.
ScalarField apply_booth_effect(const ScalarField& aqi, CellIndex booth_cell,
                               const BoothParams& p);

// Sequential fold of apply_booth_effect; order-independent because the
// per-cell factors multiply.
ScalarField apply_all(const ScalarField& aqi, const Placement& placement,
                      const BoothParams& p);

// AQI(cell) * alpha: the local drop a booth at `cell` would cause right now.
double expected_improvement(const ScalarField& aqi, CellIndex cell,
                            const BoothParams& p);

// All placement gates; returns every violated constraint. A booth already at
// the cell is reported as a Distance violation (zero separation).
std::pair<bool, std::vector<ConstraintViolation>> is_valid_cell(
    const EnvState& state, CellIndex cell, const Placement& existing,
    const ConstraintSet& c, const BoothParams& p);

// Replays a placement against the initial state and counts, per kind, the
// violations each booth had at its own placement step.
std::array<int, 5> audit_placement(const EnvState& initial, const Placement& placement,
                                   const ConstraintSet& c, const BoothParams& p);

// {strategy, booths: [{x, y, lat, lon, step}]}
std::string placement_to_json(const Placement& placement, const GridSpec& spec);
Placement placement_from_json(const std::string& text, const std::string& origin);
void write_placement(const Placement& placement, const GridSpec& spec,
                     const std::string& path);
Placement read_placement(const std::string& path);

}  // namespace aerogrid::booth
