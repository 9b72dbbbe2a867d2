#include "aerogrid/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aerogrid/io.hpp"
#include "aerogrid/rng.hpp"
#include "json.hpp"

namespace aerogrid::ppo {

void PPOConfig::validate() const {
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) {
    throw ValidationError("clip_eps must lie in (0, 1)");
  }
  if (!(gamma > 0.0 && gamma <= 1.0) || !(gae_lambda > 0.0 && gae_lambda <= 1.0)) {
    throw ValidationError("gamma and gae_lambda must lie in (0, 1]");
  }
  if (batch_size < 1 || n_epochs < 1 || total_episodes < 1 || update_frequency < 1) {
    throw ValidationError("batch_size, n_epochs, total_episodes, update_frequency "
                          "must be >= 1");
  }
  if (!std::isfinite(lr) || lr <= 0.0) throw ValidationError("lr must be > 0");
  for (double v : {entropy_coef, value_coef, max_grad_norm}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("loss coefficients must be finite and >= 0");
    }
  }
  if (checkpoint_interval < 0) {
    throw ValidationError("checkpoint_interval must be >= 0");
  }
}

GaeResult compute_gae(const Trajectory& traj, double gamma, double lambda) {
  const auto& s = traj.steps;
  if (s.empty()) throw ValidationError("cannot compute GAE of an empty trajectory");
  GaeResult out;
  out.advantages.resize(s.size());
  out.returns.resize(s.size());
  double acc = 0.0;
  for (std::size_t t = s.size(); t-- > 0;) {
    double next_v = (t + 1 < s.size()) ? s[t + 1].value : traj.bootstrap_value;
    double nonterminal = s[t].done ? 0.0 : 1.0;
    double delta = s[t].reward + gamma * next_v * nonterminal - s[t].value;
    acc = delta + gamma * lambda * nonterminal * acc;
    out.advantages[t] = acc;
    out.returns[t] = acc + s[t].value;
  }
  return out;
}

double clipped_surrogate(double ratio, double advantage, double eps) {
  double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double entropy_bonus(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double value_loss(const std::vector<double>& predictions,
                  const std::vector<double>& returns) {
  if (predictions.size() != returns.size()) {
    throw DomainError("value_loss inputs differ in length");
  }
  if (predictions.empty()) throw ValidationError("value_loss needs at least one sample");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - returns[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

std::string train_log_to_csv(const TrainLog& log) {
  std::ostringstream out;
  out << "episode,reward,aqi_improvement_pct,policy_loss,value_loss,entropy\n";
  for (const auto& e : log.episodes) {
    out << e.episode << ',' << io::fmt_double(e.reward) << ','
        << io::fmt_double(e.aqi_improvement_pct) << ','
        << io::fmt_double(e.policy_loss) << ',' << io::fmt_double(e.value_loss)
        << ',' << io::fmt_double(e.entropy) << '\n';
  }
  return out.str();
}

void write_train_log(const TrainLog& log, const std::string& path) {
  io::write_text_file(path, train_log_to_csv(log));
}

SampleLoss sample_loss_and_grad(const ForwardResult& fr, int action,
                                double old_logprob, double advantage, double ret,
                                const PPOConfig& cfg, std::vector<double>& dlogits,
                                double& dvalue) {
  const auto& p = fr.probs;
  if (action < 0 || static_cast<std::size_t>(action) >= p.size()) {
    throw DomainError("action index outside the distribution");
  }
  double new_logprob = std::log(p[static_cast<std::size_t>(action)]);
  double ratio = std::exp(new_logprob - old_logprob);
  double surrogate = clipped_surrogate(ratio, advantage, cfg.clip_eps);
  double entropy = entropy_bonus(p);
  double verr = fr.value - ret;

  SampleLoss loss;
  loss.policy = -surrogate;
  loss.value_sq_err = verr * verr;
  loss.entropy = entropy;

  // d(-surrogate)/dratio: the unclipped branch is active when r*A <= clip(r)*A;
  // otherwise the clip saturates and the gradient vanishes.
  double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
  double dsur_dr =
      (ratio * advantage <= clipped * advantage) ? advantage : 0.0;
  double dneg_dlogp = -dsur_dr * ratio;  // through r = exp(logp - old)

  dlogits.assign(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;  // masked or underflowed: no gradient
    double onehot = (static_cast<int>(i) == action) ? 1.0 : 0.0;
    // policy term: dlogp/dz_i = onehot - p_i
    double g = dneg_dlogp * (onehot - p[i]);
    // entropy term of the loss (-beta * H): dH/dz_i = -p_i (ln p_i + H)
    g += cfg.entropy_coef * p[i] * (std::log(p[i]) + entropy);
    dlogits[i] = g;
  }
  dvalue = cfg.value_coef * 2.0 * verr;
  return loss;
}

int sample_action(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += probs[i];
    if (u < acc) return last_positive;
  }
  if (last_positive < 0) {
    throw DegenerateDistributionError("cannot sample from an all-zero distribution");
  }
  return last_positive;  // u landed in the rounding tail
}

namespace {

struct FlatSample {
  const StepSample* step;
  double advantage;
  double ret;
};

void write_nan_snapshot(const std::string& path, int episode, int epoch,
                        double policy, double value, double entropy,
                        const PolicyValueNet& net) {
  if (path.empty()) return;
  nlohmann::ordered_json j;
  j["reason"] = "non-finite loss";
  j["episode"] = episode;
  j["epoch"] = epoch;
  auto number_or_text = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  j["policy_loss"] = number_or_text(policy);
  j["value_loss"] = number_or_text(value);
  j["entropy"] = number_or_text(entropy);
  j["adam_grad_norm"] = number_or_text(net.last_grad_norm());
  try {
    io::write_text_file(path, j.dump(2) + "\n");
  } catch (const Error&) {
    // the abort error message still carries the diagnostics
  }
}

}  // namespace

TrainLog train(Environment& env, PolicyValueNet& net, const PPOConfig& cfg,
               std::uint64_t seed, const CheckpointFn& on_checkpoint,
               const std::string& nan_snapshot_path) {
  cfg.validate();
  Rng rng(seed);
  TrainLog log;

  std::vector<Trajectory> window;
  double last_policy_loss = 0.0, last_value_loss = 0.0;

  for (int episode = 0; episode < cfg.total_episodes; ++episode) {
    env.reset();
    Trajectory traj;
    double episode_reward = 0.0;
    double entropy_sum = 0.0;

    bool done = false;
    while (!done) {
      StepSample s;
      s.obs = env.observation();
      s.mask = env.action_mask();
      ForwardResult fr = net.forward(s.obs, s.mask);
      s.action = sample_action(fr.probs, rng.next_double());
      s.logprob = std::log(fr.probs[static_cast<std::size_t>(s.action)]);
      s.value = fr.value;
      entropy_sum += entropy_bonus(fr.probs);
      auto [reward, step_done] = env.step(s.action);
      s.reward = reward;
      s.done = step_done;
      episode_reward += reward;
      done = step_done;
      traj.steps.push_back(std::move(s));
    }
    traj.bootstrap_value = 0.0;  // episodes always end on done

    double mean_entropy = entropy_sum / static_cast<double>(traj.steps.size());
    window.push_back(std::move(traj));

    bool update_now = static_cast<int>(window.size()) >= cfg.update_frequency ||
                      episode + 1 == cfg.total_episodes;
    if (update_now) {
      std::vector<FlatSample> batch;
      for (auto& t : window) {
        GaeResult gae = compute_gae(t, cfg.gamma, cfg.gae_lambda);
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
          batch.push_back({&t.steps[i], gae.advantages[i], gae.returns[i]});
        }
      }
      if (cfg.normalize_advantages && batch.size() >= 2) {
        double mean = 0.0;
        for (auto& b : batch) mean += b.advantage;
        mean /= static_cast<double>(batch.size());
        double var = 0.0;
        for (auto& b : batch) {
          double d = b.advantage - mean;
          var += d * d;
        }
        double sd = std::sqrt(var / static_cast<double>(batch.size()));
        double denom = std::max(sd, 1e-8);
        for (auto& b : batch) b.advantage = (b.advantage - mean) / denom;
      }

      double policy_sum = 0.0, value_sum = 0.0;
      std::size_t loss_count = 0;
      std::vector<std::size_t> order(batch.size());
      std::iota(order.begin(), order.end(), 0);
      std::vector<double> dlogits;

      for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
          std::size_t end = std::min(order.size(),
                                     start + static_cast<std::size_t>(cfg.batch_size));
          double inv_n = 1.0 / static_cast<double>(end - start);
          net.zero_grad();
          for (std::size_t k = start; k < end; ++k) {
            const FlatSample& b = batch[order[k]];
            ForwardResult fr = net.forward(b.step->obs, b.step->mask);
            double dvalue = 0.0;
            SampleLoss l = sample_loss_and_grad(fr, b.step->action, b.step->logprob,
                                                b.advantage, b.ret, cfg, dlogits,
                                                dvalue);
            double combined = l.policy + cfg.value_coef * l.value_sq_err -
                              cfg.entropy_coef * l.entropy;
            if (!std::isfinite(combined)) {
              write_nan_snapshot(nan_snapshot_path, episode, epoch, l.policy,
                                 l.value_sq_err, l.entropy, net);
              throw NumericError(
                  "non-finite loss at episode " + std::to_string(episode) +
                  (nan_snapshot_path.empty() ? std::string()
                                             : "; snapshot: " + nan_snapshot_path));
            }
            for (double& g : dlogits) g *= inv_n;
            net.backward(dlogits, dvalue * inv_n);
            policy_sum += l.policy;
            value_sum += l.value_sq_err;
            ++loss_count;
          }
          net.adam_update(cfg.lr, cfg.max_grad_norm);
        }
      }
      last_policy_loss = policy_sum / static_cast<double>(loss_count);
      last_value_loss = value_sum / static_cast<double>(loss_count);
      window.clear();
    }

    EpisodeLog e;
    e.episode = episode;
    e.reward = episode_reward;
    e.aqi_improvement_pct = env.episode_improvement_pct();
    e.policy_loss = last_policy_loss;
    e.value_loss = last_value_loss;
    e.entropy = mean_entropy;
    log.episodes.push_back(e);

    if (on_checkpoint && cfg.checkpoint_interval > 0 &&
        (episode + 1) % cfg.checkpoint_interval == 0) {
      on_checkpoint(episode, net, log);
    }
  }
  return log;
}

}  // namespace aerogrid::ppo
