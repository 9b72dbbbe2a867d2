#include "aerogrid/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <utility>

#include "aerogrid/env.hpp"
#include "aerogrid/errors.hpp"
#include "aerogrid/influence.hpp"
#include "aerogrid/io.hpp"
#include "aerogrid/manifest.hpp"
#include "aerogrid/net.hpp"
#include "aerogrid/strategies.hpp"
#include "aerogrid/svg.hpp"

namespace aerogrid::pipeline {

namespace fs = std::filesystem;
using booth::StrategyKind;
using ingest::FeatureKind;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

struct Outputs {
  explicit Outputs(const RunConfig& cfg)
      : dir(cfg.paths.output_dir),
        hash(config::config_hash(cfg)),
        m(manifest::Manifest::load(join(cfg.paths.output_dir, kManifestFile))) {
    fs::create_directories(dir);
    m.config_hash = hash;
  }

  void emit(const std::string& name, const std::string& content) {
    io::write_text_file(join(dir, name), content);
    m.record_output(name, join(dir, name), hash);
  }

  // For files written by other modules (checkpoints).
  void note(const std::string& name) {
    m.record_output(name, join(dir, name), hash);
  }

  void input(const std::string& name, const std::string& path) {
    m.record_input(name, path);
  }

  void save() { m.save(join(dir, kManifestFile)); }

  std::string dir;
  std::string hash;
  manifest::Manifest m;
};

std::vector<ingest::FeatureSite> sites_of(
    const std::vector<ingest::FeatureSite>& sites, FeatureKind kind) {
  std::vector<ingest::FeatureSite> out;
  for (const ingest::FeatureSite& s : sites) {
    if (s.kind == kind) out.push_back(s);
  }
  return out;
}

const char* strategy_suffix(StrategyKind s) { return booth::strategy_name(s); }

}  // namespace

std::string placement_file(StrategyKind s) {
  return std::string("placement_") + strategy_suffix(s) + ".json";
}
std::string after_field_file(StrategyKind s) {
  return std::string("aqi_after_") + strategy_suffix(s) + ".csv";
}
std::string trace_file(StrategyKind s) {
  return std::string("trace_") + strategy_suffix(s) + ".jsonl";
}
std::string report_file(StrategyKind s) {
  return std::string("report_") + strategy_suffix(s) + ".json";
}
std::string heatmap_file(StrategyKind s) {
  return std::string("heatmap_") + strategy_suffix(s) + ".svg";
}

City make_city(const RunConfig& cfg) {
  City city;
  if (!cfg.paths.stations.empty() || !cfg.paths.sites.empty()) {
    if (cfg.paths.stations.empty() || cfg.paths.sites.empty()) {
      throw ConfigError("stations and sites paths must be set together");
    }
    if (!fs::exists(cfg.paths.stations)) {
      throw ConfigError("station file not found: " + cfg.paths.stations);
    }
    if (!fs::exists(cfg.paths.sites)) {
      throw ConfigError("site file not found: " + cfg.paths.sites);
    }
    city.stations = ingest::read_stations(cfg.paths.stations);
    city.sites = ingest::read_sites(cfg.paths.sites);
    std::string aux = join(cfg.paths.output_dir, kAuxAqiFile);
    if (fs::exists(aux)) city.aux_aqi = io::read_field(aux, cfg.grid);
    return city;
  }
  std::string stations = join(cfg.paths.output_dir, kStationsFile);
  std::string sites = join(cfg.paths.output_dir, kSitesFile);
  std::string aux = join(cfg.paths.output_dir, kAuxAqiFile);
  if (fs::exists(stations) && fs::exists(sites)) {
    city.stations = ingest::read_stations(stations);
    city.sites = ingest::read_sites(sites);
    if (fs::exists(aux)) city.aux_aqi = io::read_field(aux, cfg.grid);
    return city;
  }
  ingest::SyntheticCity synth =
      ingest::generate_synthetic_city(cfg.synthetic, cfg.grid);
  city.stations = std::move(synth.stations);
  city.sites = std::move(synth.sites);
  city.aux_aqi = std::move(synth.aux_aqi);
  return city;
}

EnvState build_state(const RunConfig& cfg, const City& city) {
  std::vector<ingest::StationRecord> imputed =
      ingest::impute_missing(city.stations, cfg.impute_radius_km);
  std::vector<std::pair<GeoPoint, double>> samples;
  samples.reserve(imputed.size());
  for (const ingest::StationRecord& rec : imputed) {
    samples.emplace_back(rec.location, ingest::average_station_aqi(rec));
  }
  ScalarField aqi = ingest::idw_interpolate(samples, cfg.grid);
  if (city.aux_aqi) aqi = ingest::fuse_max(aqi, *city.aux_aqi);

  auto channel = [&](FeatureKind kind) {
    const config::InfluenceChannelConfig& ch = config::channel_config(cfg, kind);
    return influence::build_channel(kind, sites_of(city.sites, kind), cfg.grid,
                                    ch.kernel, ch.shape, ch.combine,
                                    ch.magnitude_scale);
  };
  return EnvState(std::move(aqi), channel(FeatureKind::Population),
                  channel(FeatureKind::Traffic),
                  channel(FeatureKind::Industrial), channel(FeatureKind::Green),
                  ScalarField::zeros(cfg.grid, Channel::Booth));
}

namespace {

const char* channel_file(Channel c) {
  switch (c) {
    case Channel::AQI: return "aqi.csv";
    case Channel::Population: return "population.csv";
    case Channel::Traffic: return "traffic.csv";
    case Channel::Industrial: return "industrial.csv";
    case Channel::Green: return "green.csv";
    case Channel::Booth: return "booth.csv";
  }
  throw DomainError("unknown channel");
}

ScalarField read_channel(const RunConfig& cfg, Channel c) {
  std::string path = join(cfg.paths.output_dir, channel_file(c));
  if (!fs::exists(path)) {
    throw ConfigError("channel file not found (run ingest first): " + path);
  }
  ScalarField f = io::read_field(path, cfg.grid);
  if (f.channel() != c) {
    throw ValidationError(path + ": expected channel " +
                          std::string(channel_name(c)) + ", got " +
                          channel_name(f.channel()));
  }
  return f;
}

}  // namespace

EnvState read_state(const RunConfig& cfg) {
  return EnvState(read_channel(cfg, Channel::AQI),
                  read_channel(cfg, Channel::Population),
                  read_channel(cfg, Channel::Traffic),
                  read_channel(cfg, Channel::Industrial),
                  read_channel(cfg, Channel::Green),
                  read_channel(cfg, Channel::Booth));
}

void cmd_synth(const RunConfig& cfg) {
  ingest::SyntheticCity synth =
      ingest::generate_synthetic_city(cfg.synthetic, cfg.grid);
  Outputs out(cfg);
  out.emit(kStationsFile, ingest::stations_to_csv(synth.stations));
  out.emit(kSitesFile, ingest::sites_to_csv(synth.sites));
  out.emit(kAuxAqiFile, io::field_to_csv(synth.aux_aqi));
  out.save();
}

void cmd_ingest(const RunConfig& cfg, bool self_check) {
  City city = make_city(cfg);
  EnvState state = build_state(cfg, city);

  if (self_check) {
    // fused field must dominate the IDW input pointwise
    std::vector<ingest::StationRecord> imputed =
        ingest::impute_missing(city.stations, cfg.impute_radius_km);
    std::vector<std::pair<GeoPoint, double>> samples;
    for (const ingest::StationRecord& rec : imputed) {
      samples.emplace_back(rec.location, ingest::average_station_aqi(rec));
    }
    ScalarField idw = ingest::idw_interpolate(samples, cfg.grid);
    for (std::size_t i = 0; i < cfg.grid.cell_count(); ++i) {
      bool ok = state.aqi.at_flat(i) >= idw.at_flat(i) - 1e-12;
      if (ok && city.aux_aqi) {
        ok = state.aqi.at_flat(i) >= city.aux_aqi->at_flat(i) - 1e-12;
      }
      if (!ok) {
        throw NumericError("ingest self-check failed: fused AQI below an input at cell " +
                           std::to_string(i));
      }
    }
  }

  Outputs out(cfg);
  if (!cfg.paths.stations.empty()) {
    out.input(kStationsFile, cfg.paths.stations);
    out.input(kSitesFile, cfg.paths.sites);
  }
  for (const ScalarField* f : {&state.aqi, &state.population, &state.traffic,
                               &state.industrial, &state.green, &state.booth}) {
    out.emit(channel_file(f->channel()), io::field_to_csv(*f));
  }
  out.emit("heatmap_initial.svg", svg::heatmap(state.aqi, "Initial AQI"));
  out.save();
}

ppo::TrainLog cmd_train(const RunConfig& cfg) {
  EnvState state = read_state(cfg);
  env::BoothEnv booth_env(std::move(state), cfg.constraints, cfg.booth,
                          cfg.rewards, cfg.episode, cfg.seeds.train);
  strategies::BoothTask task(std::move(booth_env));
  neural::PolicyValueNet net(config::net_config(cfg));

  Outputs out(cfg);
  std::string ckpt_path = join(cfg.paths.output_dir, kCheckpointFile);
  auto on_checkpoint = [&](int, const neural::PolicyValueNet& n,
                           const ppo::TrainLog&) { n.save(ckpt_path); };
  ppo::TrainLog log =
      ppo::train(task, net, cfg.ppo, cfg.seeds.train, on_checkpoint,
                 join(cfg.paths.output_dir, "nan_snapshot.json"));

  net.save(ckpt_path);
  out.note(kCheckpointFile);
  out.note(std::string(kCheckpointFile) + ".json");
  out.emit(kTrainLogFile, ppo::train_log_to_csv(log));

  std::vector<double> reward, improvement, policy_loss, value_loss, entropy;
  for (const ppo::EpisodeLog& e : log.episodes) {
    reward.push_back(e.reward);
    improvement.push_back(e.aqi_improvement_pct);
    policy_loss.push_back(e.policy_loss);
    value_loss.push_back(e.value_loss);
    entropy.push_back(e.entropy);
  }
  out.emit("training_reward.svg",
           svg::line_chart({{"reward", reward}}, "Episode reward", "episode",
                           "reward"));
  out.emit("training_improvement.svg",
           svg::line_chart({{"aqi_improvement_pct", improvement}},
                           "Episode AQI improvement", "episode", "percent"));
  out.emit("training_loss.svg",
           svg::line_chart({{"policy_loss", policy_loss},
                            {"value_loss", value_loss}},
                           "Training losses", "episode", "loss"));
  out.emit("training_entropy.svg",
           svg::line_chart({{"entropy", entropy}}, "Policy entropy", "episode",
                           "nats"));
  out.save();
  return log;
}

booth::Placement cmd_place(const RunConfig& cfg, StrategyKind strategy) {
  EnvState state = read_state(cfg);
  booth::Placement placement;
  switch (strategy) {
    case StrategyKind::Random:
      placement = strategies::random_placement(state, cfg.constraints,
                                               cfg.booth, cfg.seeds.placement);
      break;
    case StrategyKind::Greedy:
      placement = strategies::greedy_placement(
          state, cfg.constraints, cfg.booth, cfg.strategy.greedy_mode,
          cfg.strategy.greedy_ignores_green);
      break;
    case StrategyKind::PPO: {
      std::string ckpt = join(cfg.paths.output_dir, kCheckpointFile);
      if (!fs::exists(ckpt)) {
        throw ConfigError("checkpoint not found (run train first): " + ckpt);
      }
      neural::PolicyValueNet net = neural::PolicyValueNet::load(ckpt);
      placement =
          strategies::ppo_placement(net, state, cfg.constraints, cfg.booth);
      break;
    }
  }

  ScalarField after = booth::apply_all(state.aqi, placement, cfg.booth);

  // replay for the step trace
  env::BoothEnv replay(state, cfg.constraints, cfg.booth, cfg.rewards,
                       cfg.episode, cfg.seeds.placement);
  env::TraceWriter trace;
  for (CellIndex cell : placement.cells) {
    if (replay.done()) break;
    env::StepResult r =
        replay.step(static_cast<int>(flat_index(cfg.grid, cell)));
    trace.record(replay, r);
  }

  Outputs out(cfg);
  out.emit(placement_file(strategy),
           booth::placement_to_json(placement, cfg.grid));
  out.emit(after_field_file(strategy), io::field_to_csv(after));
  out.emit(trace_file(strategy), trace.text());
  out.emit(heatmap_file(strategy),
           svg::heatmap(after,
                        std::string("AQI after ") + strategy_suffix(strategy) +
                            " placement",
                        &placement));
  out.save();
  return placement;
}

namespace {

metrics::EvaluationReport evaluate_strategy(const RunConfig& cfg,
                                            const EnvState& state,
                                            StrategyKind strategy) {
  std::string path = join(cfg.paths.output_dir, placement_file(strategy));
  if (!fs::exists(path)) {
    throw ConfigError("placement not found (run place first): " + path);
  }
  booth::Placement placement = booth::read_placement(path);
  ScalarField after = booth::apply_all(state.aqi, placement, cfg.booth);
  return metrics::evaluate(state.aqi, after, state, placement,
                           config::metrics_config(cfg));
}

}  // namespace

metrics::EvaluationReport cmd_evaluate(const RunConfig& cfg,
                                       StrategyKind strategy) {
  EnvState state = read_state(cfg);
  metrics::EvaluationReport report = evaluate_strategy(cfg, state, strategy);
  Outputs out(cfg);
  out.emit(report_file(strategy), metrics::report_to_json(report));
  out.save();
  return report;
}

std::vector<metrics::EvaluationReport> cmd_compare(const RunConfig& cfg) {
  EnvState state = read_state(cfg);
  constexpr StrategyKind kStrategies[] = {StrategyKind::Random,
                                          StrategyKind::Greedy,
                                          StrategyKind::PPO};
  std::string missing;
  for (StrategyKind s : kStrategies) {
    if (!fs::exists(join(cfg.paths.output_dir, placement_file(s)))) {
      if (!missing.empty()) missing += ", ";
      missing += strategy_suffix(s);
    }
  }
  if (!missing.empty()) {
    throw ConfigError("missing placements for: " + missing);
  }

  std::vector<metrics::EvaluationReport> reports;
  Outputs out(cfg);
  for (StrategyKind s : kStrategies) {
    reports.push_back(evaluate_strategy(cfg, state, s));
    out.emit(report_file(s), metrics::report_to_json(reports.back()));
  }
  out.emit(kComparisonFile, metrics::comparison_csv(reports));
  out.emit("radar.svg",
           svg::radar_chart(metrics::radar_normalize(reports),
                            "Strategy comparison (normalized)"));
  out.save();
  return reports;
}

}  // namespace aerogrid::pipeline
