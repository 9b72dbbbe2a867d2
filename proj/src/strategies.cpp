#include "aerogrid/strategies.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "aerogrid/errors.hpp"
#include "aerogrid/rng.hpp"

namespace aerogrid::strategies {

using booth::BoothParams;
using booth::ConstraintSet;
using booth::Placement;
using booth::StrategyKind;

namespace {

EnvState with_empty_booths(const EnvState& base) {
  return EnvState(base.aqi, base.population, base.traffic, base.industrial,
                  base.green, ScalarField::zeros(base.spec(), Channel::Booth));
}

// Applies the booth at `cell`: AQI decays, the booth grid flips to 1.
void place(EnvState& state, Placement& placement, CellIndex cell,
           const BoothParams& p) {
  ScalarField next_aqi = booth::apply_booth_effect(state.aqi, cell, p);
  std::vector<double> booth_vals = state.booth.values();
  booth_vals[flat_index(state.spec(), cell)] = 1.0;
  ScalarField next_booth = state.booth.with_values(std::move(booth_vals));
  state = EnvState(std::move(next_aqi), state.population, state.traffic,
                   state.industrial, state.green, std::move(next_booth));
  placement.cells.push_back(cell);
}

}  // namespace

Placement random_placement(const EnvState& base,
                           const ConstraintSet& constraints,
                           const BoothParams& params, std::uint64_t seed) {
  constraints.validate();
  params.validate();
  Rng rng(seed);
  EnvState state = with_empty_booths(base);
  const GridSpec& spec = state.spec();
  Placement out{StrategyKind::Random, {}};
  std::vector<std::size_t> valid;
  while (static_cast<int>(out.size()) < constraints.max_booths) {
    valid.clear();
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
      if (booth::is_valid_cell(state, cell_from_flat(spec, i), out, constraints,
                               params)
              .first) {
        valid.push_back(i);
      }
    }
    if (valid.empty()) break;
    std::size_t pick = valid[rng.next_below(valid.size())];
    place(state, out, cell_from_flat(spec, pick), params);
  }
  return out;
}

Placement greedy_placement(const EnvState& base,
                           const ConstraintSet& constraints,
                           const BoothParams& params, GreedyMode mode,
                           bool ignore_green) {
  constraints.validate();
  params.validate();
  ConstraintSet c = constraints;
  if (ignore_green) c.green_threshold = 1.0;  // green is capped at 1
  EnvState state = with_empty_booths(base);
  const GridSpec& spec = state.spec();
  const ScalarField initial_aqi = base.aqi;
  Placement out{StrategyKind::Greedy, {}};
  while (static_cast<int>(out.size()) < c.max_booths) {
    const ScalarField& rank =
        mode == GreedyMode::Static ? initial_aqi : state.aqi;
    std::size_t best = spec.cell_count();
    double best_val = 0.0;
    for (std::size_t i = 0; i < spec.cell_count(); ++i) {
      if (!booth::is_valid_cell(state, cell_from_flat(spec, i), out, c, params)
               .first) {
        continue;
      }
      double v = rank.at_flat(i);
      if (best == spec.cell_count() || v > best_val) {
        best = i;
        best_val = v;
      }
    }
    if (best == spec.cell_count()) break;
    place(state, out, cell_from_flat(spec, best), params);
  }
  return out;
}

Placement ppo_placement(neural::PolicyValueNet& policy, const EnvState& base,
                        const ConstraintSet& constraints,
                        const BoothParams& params) {
  const neural::NetConfig& cfg = policy.config();
  const GridSpec& spec = base.spec();
  if (cfg.height != spec.height || cfg.width != spec.width) {
    throw ConfigError("policy network expects a " + std::to_string(cfg.width) +
                      "x" + std::to_string(cfg.height) + " grid, state is " +
                      std::to_string(spec.width) + "x" +
                      std::to_string(spec.height));
  }
  env::EpisodeConfig episode;
  episode.max_steps = std::max(episode.max_steps, constraints.max_booths);
  env::BoothEnv e(with_empty_booths(base), constraints, params,
                  env::RewardWeights{}, episode, 0);
  Placement out{StrategyKind::PPO, {}};
  while (!e.done()) {
    std::vector<std::uint8_t> mask = e.action_mask();
    if (std::none_of(mask.begin(), mask.end(),
                     [](std::uint8_t m) { return m != 0; })) {
      break;
    }
    neural::ForwardResult fr = policy.forward(e.state(), mask);
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < fr.probs.size(); ++i) {
      if (mask[i] && fr.probs[i] > best_p) {
        best_p = fr.probs[i];
        best = i;
      }
    }
    env::StepResult r = e.step(static_cast<int>(best));
    if (r.action_valid) out.cells.push_back(cell_from_flat(spec, best));
  }
  return out;
}

double placement_reward(const EnvState& base, const Placement& placement,
                        const ConstraintSet& constraints,
                        const BoothParams& params,
                        const env::RewardWeights& weights,
                        const env::EpisodeConfig& episode) {
  env::EpisodeConfig ep = episode;
  ep.max_steps = std::max(ep.max_steps, static_cast<int>(placement.size()));
  env::BoothEnv e(with_empty_booths(base), constraints, params, weights, ep, 0);
  double total = 0.0;
  for (CellIndex cell : placement.cells) {
    if (e.done()) break;
    total += e.step(static_cast<int>(flat_index(base.spec(), cell))).reward;
  }
  return total;
}

}  // namespace aerogrid::strategies
