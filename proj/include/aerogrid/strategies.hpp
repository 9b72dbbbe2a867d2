#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aerogrid/booth.hpp"
#include "aerogrid/env.hpp"
#include "aerogrid/net.hpp"
#include "aerogrid/ppo.hpp"

namespace aerogrid::strategies {

// Adapts a BoothEnv to the trainer's Environment interface. With masking
// disabled in the episode config the mask is reported empty (all actions
// allowed) and invalid picks fall through to the env's penalty path.
class BoothTask : public ppo::Environment {
 public:
  explicit BoothTask(env::BoothEnv e) : env_(std::move(e)) {}

  void reset() override { env_.reset(); }
  ppo::Tensor observation() const override {
    return neural::observation_tensor(env_.state());
  }
  std::vector<std::uint8_t> action_mask() const override {
    if (!env_.episode_config().masking) return {};
    return env_.action_mask();
  }
  std::pair<double, bool> step(int action) override {
    env::StepResult r = env_.step(action);
    return {r.reward, r.done};
  }
  double episode_improvement_pct() const override {
    return env_.improvement_pct();
  }

  env::BoothEnv& booth_env() { return env_; }
  const env::BoothEnv& booth_env() const { return env_; }

 private:
  env::BoothEnv env_;
};

enum class GreedyMode { Static, Dynamic };

// Uniform pick among currently valid cells until the budget is spent or no
// valid cell remains. Deterministic under seed; the AQI field evolves as
// booths are applied, so validity is re-derived each round.
booth::Placement random_placement(const EnvState& base,
                                  const booth::ConstraintSet& constraints,
                                  const booth::BoothParams& params,
                                  std::uint64_t seed);

// Highest-ranked valid cell each round, ties broken by smallest row-major
// flat index. Dynamic mode ranks on the current post-effect AQI field,
// Static on the initial field; validity always tracks the current state.
// ignore_green lifts the greenspace gate (threshold forced to 1.0).
booth::Placement greedy_placement(const EnvState& base,
                                  const booth::ConstraintSet& constraints,
                                  const booth::BoothParams& params,
                                  GreedyMode mode = GreedyMode::Dynamic,
                                  bool ignore_green = false);

// Greedy decode of a trained policy: argmax over the masked action
// distribution each step until the episode ends. Network/grid shape
// mismatch raises ConfigError.
booth::Placement ppo_placement(neural::PolicyValueNet& policy,
                               const EnvState& base,
                               const booth::ConstraintSet& constraints,
                               const booth::BoothParams& params);

// Replays a placement through a fresh BoothEnv and returns the summed
// composite reward, so strategies can be compared on the training signal.
double placement_reward(const EnvState& base,
                        const booth::Placement& placement,
                        const booth::ConstraintSet& constraints,
                        const booth::BoothParams& params,
                        const env::RewardWeights& weights,
                        const env::EpisodeConfig& episode);

}  // namespace aerogrid::strategies
