#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "aerogrid/booth.hpp"
#include "aerogrid/env.hpp"
#include "aerogrid/grid.hpp"
#include "aerogrid/influence.hpp"
#include "aerogrid/ingest.hpp"
#include "aerogrid/metrics.hpp"
#include "aerogrid/net.hpp"
#include "aerogrid/ppo.hpp"
#include "aerogrid/strategies.hpp"

namespace aerogrid::config {

// Influence-field construction knobs, one instance per feature kind.
struct InfluenceChannelConfig {
  influence::KernelShape shape = influence::KernelShape::Gaussian;
  influence::Combine combine = influence::Combine::Max;
  influence::KernelParams kernel;
  double magnitude_scale = 0.0;  // 0 = max site magnitude
};

struct MetricsOptions {
  double coverage_threshold = 10.0;
  double population_threshold = 0.5;
  double source_radius_cells = 0.0;  // 0 = 3 * booth sigma
  double industrial_source_threshold = 0.5;
};

struct StrategyOptions {
  strategies::GreedyMode greedy_mode = strategies::GreedyMode::Dynamic;
  bool greedy_ignores_green = false;
};

struct Seeds {
  std::uint64_t synth = 42;
  std::uint64_t train = 1;
  std::uint64_t placement = 7;
};

struct Paths {
  std::string stations;  // both empty = synthesize the city instead
  std::string sites;
  std::string output_dir = "out";
};

struct RunConfig {
  GridSpec grid;
  ingest::SyntheticCityConfig synthetic;
  double impute_radius_km = 5.0;
  std::array<InfluenceChannelConfig, 4> influence;  // FeatureKind order
  booth::BoothParams booth;
  booth::ConstraintSet constraints;
  env::RewardWeights rewards;
  env::EpisodeConfig episode;
  ppo::PPOConfig ppo;
  MetricsOptions metrics;
  StrategyOptions strategy;
  Seeds seeds;
  Paths paths;

  void validate() const;  // rewraps module validation into ConfigError
};

RunConfig default_config();

// Strict parse: unknown keys anywhere are rejected; missing keys keep their
// defaults. All failures surface as ConfigError.
RunConfig config_from_json(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

// Canonical full dump; equal configs serialize identically.
std::string config_to_json(const RunConfig& cfg);

// SHA-256 hex of the canonical dump.
std::string config_hash(const RunConfig& cfg);

// AEROGRID_SEED, when set, overrides every seed. Applied after flags.
void apply_seed_env(RunConfig& cfg);

// Derived sub-configs.
metrics::MetricsConfig metrics_config(const RunConfig& cfg);
neural::NetConfig net_config(const RunConfig& cfg);
const InfluenceChannelConfig& channel_config(const RunConfig& cfg,
                                             ingest::FeatureKind kind);

}  // namespace aerogrid::config
