#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aerogrid/net.hpp"
#include "aerogrid/tensor.hpp"

namespace aerogrid::ppo {

using neural::ForwardResult;
using neural::PolicyValueNet;
using neural::Tensor;

struct PPOConfig {
  double lr = 2.5e-4;
  double gamma = 0.97;
  double gae_lambda = 0.95;
  double clip_eps = 0.15;
  int batch_size = 64;
  int n_epochs = 5;
  double entropy_coef = 0.1;
  double value_coef = 0.5;
  double max_grad_norm = 1.0;
  int total_episodes = 100;
  int update_frequency = 1;  // episodes per PPO update
  bool normalize_advantages = true;
  int checkpoint_interval = 0;  // episodes between checkpoint callbacks; 0 = off
  void validate() const;
};

struct StepSample {
  Tensor obs;
  std::vector<std::uint8_t> mask;
  int action = 0;
  double reward = 0.0;
  double logprob = 0.0;  // behavior policy, recorded at sampling time
  double value = 0.0;
  bool done = false;
};

struct Trajectory {
  std::vector<StepSample> steps;
  double bootstrap_value = 0.0;  // V(s_T), used only when the last step is not done
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Truncated GAE, resetting across done boundaries; returns = advantages + values.
GaeResult compute_gae(const Trajectory& traj, double gamma, double lambda);

// min(r*A, clip(r, 1-eps, 1+eps)*A).
double clipped_surrogate(double ratio, double advantage, double eps);

// -sum p ln p over p > 0.
double entropy_bonus(const std::vector<double>& probs);

// Mean squared error.
double value_loss(const std::vector<double>& predictions,
                  const std::vector<double>& returns);

// What the trainer needs from an environment. One episode at a time; reset()
// begins a new one.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual void reset() = 0;
  virtual Tensor observation() const = 0;
  virtual std::vector<std::uint8_t> action_mask() const = 0;
  virtual std::pair<double, bool> step(int action) = 0;  // (reward, done)
  virtual double episode_improvement_pct() const { return 0.0; }
};

struct EpisodeLog {
  int episode = 0;
  double reward = 0.0;
  double aqi_improvement_pct = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainLog {
  std::vector<EpisodeLog> episodes;
};

// episode,reward,aqi_improvement_pct,policy_loss,value_loss,entropy
std::string train_log_to_csv(const TrainLog& log);
void write_train_log(const TrainLog& log, const std::string& path);

// Per-sample PPO loss and its gradient w.r.t. the policy logits and the value
// output. Returns {policy_loss_term, squared value error, entropy}; the
// combined objective is policy + value_coef * value - entropy_coef * entropy.
// dlogits/dvalue are unscaled (no 1/batch factor).
struct SampleLoss {
  double policy = 0.0;
  double value_sq_err = 0.0;
  double entropy = 0.0;
};
SampleLoss sample_loss_and_grad(const ForwardResult& fr, int action,
                                double old_logprob, double advantage, double ret,
                                const PPOConfig& cfg, std::vector<double>& dlogits,
                                double& dvalue);

using CheckpointFn =
    std::function<void(int episode, const PolicyValueNet& net, const TrainLog& log)>;

// Algorithm: per update window, rollout -> GAE -> n_epochs of shuffled
// minibatches -> clipped-gradient Adam steps. Deterministic under seed.
// A non-finite loss aborts with a diagnostic snapshot written to
// nan_snapshot_path (when non-empty).
TrainLog train(Environment& env, PolicyValueNet& net, const PPOConfig& cfg,
               std::uint64_t seed, const CheckpointFn& on_checkpoint = {},
               const std::string& nan_snapshot_path = {});

// Samples an index from a distribution via the inverse CDF.
int sample_action(const std::vector<double>& probs, double u);

}  // namespace aerogrid::ppo
