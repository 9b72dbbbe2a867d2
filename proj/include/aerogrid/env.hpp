#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aerogrid/booth.hpp"
#include "aerogrid/grid.hpp"

namespace aerogrid::env {

using booth::BoothParams;
using booth::ConstraintSet;
using booth::ConstraintViolation;
using booth::Placement;
using booth::ViolationKind;

struct RewardWeights {
  double w_local = 0.3;
  double w_global = 0.3;
  double w_population = 0.2;
  double w_traffic = 0.1;
  double w_industrial = 0.1;
  // Penalty weights w_c, per constraint kind.
  double penalty_distance = 1.0;
  double penalty_greenspace = 1.0;
  double penalty_max_booths = 1.0;
  double penalty_population = 1.0;
  double penalty_improvement = 1.0;

  void validate() const;
  double penalty_for(ViolationKind k) const;
};

struct EpisodeConfig {
  int max_steps = 300;
  double reward_scaling = 0.1;
  double action_penalty = 0.01;
  bool masking = true;
  void validate() const;
};

struct RewardBreakdown {
  double r_local = 0.0;
  double r_global = 0.0;
  double r_population = 0.0;
  double r_traffic = 0.0;
  double r_industrial = 0.0;
  double penalty = 0.0;  // P = -sum w_c v_c
};

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  bool done = false;
  bool action_valid = false;
  int action = -1;
  RewardBreakdown info;
};

// Eq.-14 composite over the booth's influence neighborhood (cells within
// `radius` in cell units). Returns the scaled reward and its breakdown:
// reward = (w . R + P) * reward_scaling - action_penalty.
std::pair<double, RewardBreakdown> compute_reward(
    const ScalarField& before, const ScalarField& after, CellIndex cell,
    const EnvState& state, const RewardWeights& w,
    const std::vector<ConstraintViolation>& violations, double radius,
    double reward_scaling, double action_penalty);

// One booth per step over a static city; episodes end on booth budget,
// max_steps, or an all-false action mask.
class BoothEnv {
 public:
  BoothEnv(EnvState base, ConstraintSet constraints, BoothParams params,
           RewardWeights weights, EpisodeConfig episode, std::uint64_t seed = 0);

  const EnvState& reset(std::uint64_t seed);
  const EnvState& reset();

  // Flat row-major validity mask (y + x*width).
  std::vector<std::uint8_t> action_mask() const;

  StepResult step(int flat_action);

  bool done() const { return done_; }
  int steps_taken() const { return steps_; }
  const EnvState& state() const { return state_; }
  const EnvState& base() const { return base_; }
  const Placement& placement() const { return placement_; }
  const ConstraintSet& constraints() const { return constraints_; }
  const BoothParams& booth_params() const { return params_; }
  const RewardWeights& weights() const { return weights_; }
  const EpisodeConfig& episode_config() const { return episode_; }
  double influence_radius_cells() const { return 3.0 * params_.sigma_booth; }

  // (initial mean - current mean) / initial mean * 100.
  double improvement_pct() const;

 private:
  bool any_valid() const;

  EnvState base_;
  EnvState state_;
  ConstraintSet constraints_;
  BoothParams params_;
  RewardWeights weights_;
  EpisodeConfig episode_;
  std::uint64_t seed_;
  Placement placement_;
  int steps_ = 0;
  bool done_ = false;
};

// JSON-lines episode trace: one record per step.
class TraceWriter {
 public:
  void record(const BoothEnv& env, const StepResult& result);
  const std::string& text() const { return buffer_; }
  void write(const std::string& path) const;

 private:
  std::string buffer_;
  int step_ = 0;
};

}  // namespace aerogrid::env
