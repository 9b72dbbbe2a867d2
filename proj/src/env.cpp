#include "aerogrid/env.hpp"

#include <cmath>

#include "aerogrid/io.hpp"
#include "json.hpp"

namespace aerogrid::env {

void RewardWeights::validate() const {
  for (double v : {w_local, w_global, w_population, w_traffic, w_industrial,
                   penalty_distance, penalty_greenspace, penalty_max_booths,
                   penalty_population, penalty_improvement}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("reward weights must be finite and >= 0");
    }
  }
}

double RewardWeights::penalty_for(ViolationKind k) const {
  switch (k) {
    case ViolationKind::Distance: return penalty_distance;
    case ViolationKind::Greenspace: return penalty_greenspace;
    case ViolationKind::MaxBooths: return penalty_max_booths;
    case ViolationKind::Population: return penalty_population;
    case ViolationKind::ImprovementPotential: return penalty_improvement;
  }
  throw DomainError("unknown violation kind");
}

void EpisodeConfig::validate() const {
  if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (!std::isfinite(reward_scaling) || !std::isfinite(action_penalty)) {
    throw ValidationError("episode scaling values must be finite");
  }
}

std::pair<double, RewardBreakdown> compute_reward(
    const ScalarField& before, const ScalarField& after, CellIndex cell,
    const EnvState& state, const RewardWeights& w,
    const std::vector<ConstraintViolation>& violations, double radius,
    double reward_scaling, double action_penalty) {
  if (!(before.spec() == after.spec()) || !(before.spec() == state.spec())) {
    throw DomainError("reward inputs disagree on GridSpec");
  }
  w.validate();

  RewardBreakdown b;
  b.r_local = (before.at(cell) - after.at(cell)) / 500.0;
  b.r_global = (before.mean() - after.mean()) / 500.0;

  const GridSpec& spec = before.spec();
  double sum_pop = 0.0, sum_traffic = 0.0, sum_industrial = 0.0;
  std::size_t n = 0;
  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      if (euclidean_cells({x, y}, cell) > radius) continue;
      std::size_t i = flat_index(spec, {x, y});
      double drop = before.at_flat(i) - after.at_flat(i);
      sum_pop += state.population.at_flat(i) * drop;
      sum_traffic += state.traffic.at_flat(i) * drop;
      sum_industrial += state.industrial.at_flat(i) * drop;
      ++n;
    }
  }
  double denom = 500.0 * static_cast<double>(n);
  b.r_population = sum_pop / denom;
  b.r_traffic = sum_traffic / denom;
  b.r_industrial = sum_industrial / denom;

  double penalty = 0.0;
  for (const auto& v : violations) {
    if (v.flag) penalty -= w.penalty_for(v.kind);
  }
  b.penalty = penalty;

  double total = (w.w_local * b.r_local + w.w_global * b.r_global +
                  w.w_population * b.r_population + w.w_traffic * b.r_traffic +
                  w.w_industrial * b.r_industrial + b.penalty) *
                     reward_scaling -
                 action_penalty;
  return {total, b};
}

BoothEnv::BoothEnv(EnvState base, ConstraintSet constraints, BoothParams params,
                   RewardWeights weights, EpisodeConfig episode, std::uint64_t seed)
    : base_(base),
      state_(std::move(base)),
      constraints_(constraints),
      params_(params),
      weights_(weights),
      episode_(episode),
      seed_(seed) {
  constraints_.validate();
  params_.validate();
  weights_.validate();
  episode_.validate();
  reset(seed_);
}

const EnvState& BoothEnv::reset(std::uint64_t seed) {
  seed_ = seed;
  state_ = EnvState(base_.aqi, base_.population, base_.traffic, base_.industrial,
                    base_.green, ScalarField::zeros(base_.spec(), Channel::Booth));
  placement_ = Placement{placement_.strategy, {}};
  steps_ = 0;
  done_ = false;
  return state_;
}

const EnvState& BoothEnv::reset() { return reset(seed_); }

std::vector<std::uint8_t> BoothEnv::action_mask() const {
  const GridSpec& spec = state_.spec();
  std::vector<std::uint8_t> mask(spec.cell_count(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    auto [ok, violations] =
        booth::is_valid_cell(state_, cell_from_flat(spec, i), placement_,
                             constraints_, params_);
    mask[i] = ok ? 1 : 0;
  }
  return mask;
}

bool BoothEnv::any_valid() const {
  const GridSpec& spec = state_.spec();
  for (std::size_t i = 0; i < spec.cell_count(); ++i) {
    auto [ok, violations] =
        booth::is_valid_cell(state_, cell_from_flat(spec, i), placement_,
                             constraints_, params_);
    if (ok) return true;
  }
  return false;
}

StepResult BoothEnv::step(int flat_action) {
  if (done_) throw DomainError("step called on a finished episode");
  const GridSpec& spec = state_.spec();
  if (flat_action < 0 || static_cast<std::size_t>(flat_action) >= spec.cell_count()) {
    throw DomainError("action " + std::to_string(flat_action) + " outside grid");
  }
  CellIndex cell = cell_from_flat(spec, static_cast<std::size_t>(flat_action));
  auto [valid, violations] =
      booth::is_valid_cell(state_, cell, placement_, constraints_, params_);

  double reward = 0.0;
  RewardBreakdown info;
  if (valid) {
    ScalarField before = state_.aqi;
    ScalarField after = booth::apply_booth_effect(before, cell, params_);
    std::vector<double> booth_vals = state_.booth.values();
    booth_vals[flat_index(spec, cell)] = 1.0;
    EnvState next(after, state_.population, state_.traffic, state_.industrial,
                  state_.green, state_.booth.with_values(std::move(booth_vals)));
    std::tie(reward, info) = compute_reward(
        before, after, cell, state_, weights_, {}, influence_radius_cells(),
        episode_.reward_scaling, episode_.action_penalty);
    state_ = std::move(next);
    placement_.cells.push_back(cell);
  } else {
    double penalty = 0.0;
    for (const auto& v : violations) {
      if (v.flag) penalty -= weights_.penalty_for(v.kind);
    }
    info.penalty = penalty;
    reward = penalty * episode_.reward_scaling - episode_.action_penalty;
  }

  ++steps_;
  done_ = static_cast<int>(placement_.size()) >= constraints_.max_booths ||
          steps_ >= episode_.max_steps || !any_valid();

  StepResult result{state_, reward, done_, valid, flat_action, info};
  return result;
}

double BoothEnv::improvement_pct() const {
  double initial = base_.aqi.mean();
  if (initial <= 0.0) return 0.0;
  return (initial - state_.aqi.mean()) / initial * 100.0;
}

void TraceWriter::record(const BoothEnv& env, const StepResult& result) {
  nlohmann::ordered_json j;
  CellIndex cell = cell_from_flat(env.state().spec(),
                                  static_cast<std::size_t>(result.action));
  j["step"] = step_++;
  j["action"] = result.action;
  j["x"] = cell.x;
  j["y"] = cell.y;
  j["valid"] = result.action_valid;
  j["reward"] = result.reward;
  j["breakdown"] = {{"r_local", result.info.r_local},
                    {"r_global", result.info.r_global},
                    {"r_population", result.info.r_population},
                    {"r_traffic", result.info.r_traffic},
                    {"r_industrial", result.info.r_industrial},
                    {"penalty", result.info.penalty}};
  j["mean_aqi"] = env.state().aqi.mean();
  j["done"] = result.done;
  buffer_ += j.dump() + "\n";
}

void TraceWriter::write(const std::string& path) const {
  io::write_text_file(path, buffer_);
}

}  // namespace aerogrid::env
