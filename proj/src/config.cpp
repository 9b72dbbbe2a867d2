#include "aerogrid/config.hpp"

#include <cstdlib>
#include <initializer_list>
#include <string>

#include "aerogrid/errors.hpp"
#include "aerogrid/io.hpp"
#include "aerogrid/manifest.hpp"
#include "json.hpp"

namespace aerogrid::config {

namespace {

using nlohmann::ordered_json;
using ingest::FeatureKind;

constexpr FeatureKind kKinds[] = {FeatureKind::Population, FeatureKind::Traffic,
                                  FeatureKind::Industrial, FeatureKind::Green};

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin + ": " + msg);
}

void check_keys(const ordered_json& j, const std::string& origin,
                const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(origin, "'" + path + "' must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) fail(origin, "unknown key '" + path + item.key() + "'");
  }
}

double jd(const ordered_json& j, const char* key, double dflt,
          const std::string& origin, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) fail(origin, "'" + path + key + "' must be a number");
  return j[key].get<double>();
}

int ji(const ordered_json& j, const char* key, int dflt,
       const std::string& origin, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) {
    fail(origin, "'" + path + key + "' must be an integer");
  }
  return j[key].get<int>();
}

std::uint64_t ju(const ordered_json& j, const char* key, std::uint64_t dflt,
                 const std::string& origin, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) {
    fail(origin, "'" + path + key + "' must be an integer");
  }
  if (j[key].is_number_integer() && !j[key].is_number_unsigned() &&
      j[key].get<long long>() < 0) {
    fail(origin, "'" + path + key + "' must be non-negative");
  }
  return j[key].get<std::uint64_t>();
}

bool jb(const ordered_json& j, const char* key, bool dflt,
        const std::string& origin, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_boolean()) fail(origin, "'" + path + key + "' must be a bool");
  return j[key].get<bool>();
}

std::string js(const ordered_json& j, const char* key, const std::string& dflt,
               const std::string& origin, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string()) fail(origin, "'" + path + key + "' must be a string");
  return j[key].get<std::string>();
}

const char* shape_name(influence::KernelShape s) {
  return s == influence::KernelShape::Gaussian ? "gaussian" : "radial";
}

influence::KernelShape shape_from(const std::string& s,
                                  const std::string& origin,
                                  const std::string& path) {
  if (s == "gaussian") return influence::KernelShape::Gaussian;
  if (s == "radial") return influence::KernelShape::Radial;
  fail(origin, "'" + path + "shape' must be gaussian|radial, got '" + s + "'");
}

const char* combine_name(influence::Combine c) {
  return c == influence::Combine::Max ? "max" : "sum";
}

influence::Combine combine_from(const std::string& s, const std::string& origin,
                                const std::string& path) {
  if (s == "max") return influence::Combine::Max;
  if (s == "sum") return influence::Combine::Sum;
  fail(origin, "'" + path + "combine' must be max|sum, got '" + s + "'");
}

const char* greedy_mode_name(strategies::GreedyMode m) {
  return m == strategies::GreedyMode::Dynamic ? "dynamic" : "static";
}

strategies::GreedyMode greedy_mode_from(const std::string& s,
                                        const std::string& origin,
                                        const std::string& path) {
  if (s == "dynamic") return strategies::GreedyMode::Dynamic;
  if (s == "static") return strategies::GreedyMode::Static;
  fail(origin,
       "'" + path + "greedy_mode' must be dynamic|static, got '" + s + "'");
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  for (std::size_t i = 0; i < 4; ++i) {
    cfg.influence[i].kernel = influence::default_kernel(kKinds[i]);
  }
  return cfg;
}

void RunConfig::validate() const {
  try {
    grid.validate();
    synthetic.validate();
    if (!(impute_radius_km > 0.0)) {
      throw ValidationError("impute_radius_km must be > 0");
    }
    for (std::size_t i = 0; i < 4; ++i) {
      influence::validate_kernel(influence[i].kernel);
      if (!(influence[i].magnitude_scale >= 0.0)) {
        throw ValidationError("magnitude_scale must be >= 0");
      }
    }
    booth.validate();
    constraints.validate();
    rewards.validate();
    episode.validate();
    ppo.validate();
    metrics_config(*this).validate();
    if (paths.output_dir.empty()) {
      throw ValidationError("output_dir must not be empty");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

RunConfig config_from_json(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(origin, e.what());
  }
  check_keys(j, origin, "",
             {"grid", "synthetic", "ingest", "influence", "booth",
              "constraints", "rewards", "episode", "ppo", "metrics",
              "strategies", "seeds", "paths"});

  RunConfig cfg = default_config();

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, origin, "grid.",
               {"width", "height", "lat_min", "lat_max", "lon_min", "lon_max"});
    cfg.grid.width = ji(g, "width", cfg.grid.width, origin, "grid.");
    cfg.grid.height = ji(g, "height", cfg.grid.height, origin, "grid.");
    cfg.grid.lat_min = jd(g, "lat_min", cfg.grid.lat_min, origin, "grid.");
    cfg.grid.lat_max = jd(g, "lat_max", cfg.grid.lat_max, origin, "grid.");
    cfg.grid.lon_min = jd(g, "lon_min", cfg.grid.lon_min, origin, "grid.");
    cfg.grid.lon_max = jd(g, "lon_max", cfg.grid.lon_max, origin, "grid.");
  }
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    check_keys(s, origin, "synthetic.",
               {"seed", "stations", "population_sites", "traffic_sites",
                "industrial_sites", "green_sites", "hotspot_intensity"});
    cfg.synthetic.seed = ju(s, "seed", cfg.synthetic.seed, origin, "synthetic.");
    cfg.synthetic.n_stations =
        ji(s, "stations", cfg.synthetic.n_stations, origin, "synthetic.");
    cfg.synthetic.n_pop_sites = ji(s, "population_sites",
                                   cfg.synthetic.n_pop_sites, origin,
                                   "synthetic.");
    cfg.synthetic.n_traffic_sites =
        ji(s, "traffic_sites", cfg.synthetic.n_traffic_sites, origin,
           "synthetic.");
    cfg.synthetic.n_industrial_sites =
        ji(s, "industrial_sites", cfg.synthetic.n_industrial_sites, origin,
           "synthetic.");
    cfg.synthetic.n_green_sites = ji(s, "green_sites",
                                     cfg.synthetic.n_green_sites, origin,
                                     "synthetic.");
    cfg.synthetic.hotspot_intensity =
        jd(s, "hotspot_intensity", cfg.synthetic.hotspot_intensity, origin,
           "synthetic.");
  }
  if (j.contains("ingest")) {
    const auto& g = j["ingest"];
    check_keys(g, origin, "ingest.", {"impute_radius_km"});
    cfg.impute_radius_km =
        jd(g, "impute_radius_km", cfg.impute_radius_km, origin, "ingest.");
  }
  if (j.contains("influence")) {
    const auto& inf = j["influence"];
    check_keys(inf, origin, "influence.",
               {"population", "traffic", "industrial", "green"});
    for (std::size_t i = 0; i < 4; ++i) {
      const char* kind = ingest::feature_kind_name(kKinds[i]);
      if (!inf.contains(kind)) continue;
      const auto& c = inf[kind];
      std::string path = std::string("influence.") + kind + ".";
      check_keys(c, origin, path,
                 {"shape", "combine", "weight", "sigma_cells",
                  "magnitude_scale"});
      InfluenceChannelConfig& ch = cfg.influence[i];
      ch.shape = shape_from(js(c, "shape", shape_name(ch.shape), origin, path),
                            origin, path);
      ch.combine = combine_from(
          js(c, "combine", combine_name(ch.combine), origin, path), origin,
          path);
      ch.kernel.weight = jd(c, "weight", ch.kernel.weight, origin, path);
      ch.kernel.sigma_cells =
          jd(c, "sigma_cells", ch.kernel.sigma_cells, origin, path);
      ch.magnitude_scale =
          jd(c, "magnitude_scale", ch.magnitude_scale, origin, path);
    }
  }
  if (j.contains("booth")) {
    const auto& b = j["booth"];
    check_keys(b, origin, "booth.", {"alpha", "sigma_booth"});
    cfg.booth.alpha = jd(b, "alpha", cfg.booth.alpha, origin, "booth.");
    cfg.booth.sigma_booth =
        jd(b, "sigma_booth", cfg.booth.sigma_booth, origin, "booth.");
  }
  if (j.contains("constraints")) {
    const auto& c = j["constraints"];
    check_keys(c, origin, "constraints.",
               {"d_min_km", "rho_min", "delta_aqi_min", "green_threshold",
                "max_booths"});
    cfg.constraints.d_min_km =
        jd(c, "d_min_km", cfg.constraints.d_min_km, origin, "constraints.");
    cfg.constraints.rho_min =
        jd(c, "rho_min", cfg.constraints.rho_min, origin, "constraints.");
    cfg.constraints.delta_aqi_min = jd(c, "delta_aqi_min",
                                       cfg.constraints.delta_aqi_min, origin,
                                       "constraints.");
    cfg.constraints.green_threshold =
        jd(c, "green_threshold", cfg.constraints.green_threshold, origin,
           "constraints.");
    cfg.constraints.max_booths =
        ji(c, "max_booths", cfg.constraints.max_booths, origin, "constraints.");
  }
  if (j.contains("rewards")) {
    const auto& r = j["rewards"];
    check_keys(r, origin, "rewards.",
               {"w_local", "w_global", "w_population", "w_traffic",
                "w_industrial", "penalty_distance", "penalty_greenspace",
                "penalty_max_booths", "penalty_population",
                "penalty_improvement"});
    cfg.rewards.w_local = jd(r, "w_local", cfg.rewards.w_local, origin,
                             "rewards.");
    cfg.rewards.w_global =
        jd(r, "w_global", cfg.rewards.w_global, origin, "rewards.");
    cfg.rewards.w_population =
        jd(r, "w_population", cfg.rewards.w_population, origin, "rewards.");
    cfg.rewards.w_traffic =
        jd(r, "w_traffic", cfg.rewards.w_traffic, origin, "rewards.");
    cfg.rewards.w_industrial =
        jd(r, "w_industrial", cfg.rewards.w_industrial, origin, "rewards.");
    cfg.rewards.penalty_distance = jd(r, "penalty_distance",
                                      cfg.rewards.penalty_distance, origin,
                                      "rewards.");
    cfg.rewards.penalty_greenspace =
        jd(r, "penalty_greenspace", cfg.rewards.penalty_greenspace, origin,
           "rewards.");
    cfg.rewards.penalty_max_booths =
        jd(r, "penalty_max_booths", cfg.rewards.penalty_max_booths, origin,
           "rewards.");
    cfg.rewards.penalty_population =
        jd(r, "penalty_population", cfg.rewards.penalty_population, origin,
           "rewards.");
    cfg.rewards.penalty_improvement =
        jd(r, "penalty_improvement", cfg.rewards.penalty_improvement, origin,
           "rewards.");
  }
  if (j.contains("episode")) {
    const auto& e = j["episode"];
    check_keys(e, origin, "episode.",
               {"max_steps", "reward_scaling", "action_penalty", "masking"});
    cfg.episode.max_steps =
        ji(e, "max_steps", cfg.episode.max_steps, origin, "episode.");
    cfg.episode.reward_scaling = jd(e, "reward_scaling",
                                    cfg.episode.reward_scaling, origin,
                                    "episode.");
    cfg.episode.action_penalty = jd(e, "action_penalty",
                                    cfg.episode.action_penalty, origin,
                                    "episode.");
    cfg.episode.masking = jb(e, "masking", cfg.episode.masking, origin,
                             "episode.");
  }
  if (j.contains("ppo")) {
    const auto& p = j["ppo"];
    check_keys(p, origin, "ppo.",
               {"lr", "gamma", "gae_lambda", "clip_eps", "batch_size",
                "n_epochs", "entropy_coef", "value_coef", "max_grad_norm",
                "total_episodes", "update_frequency", "normalize_advantages",
                "checkpoint_interval"});
    cfg.ppo.lr = jd(p, "lr", cfg.ppo.lr, origin, "ppo.");
    cfg.ppo.gamma = jd(p, "gamma", cfg.ppo.gamma, origin, "ppo.");
    cfg.ppo.gae_lambda = jd(p, "gae_lambda", cfg.ppo.gae_lambda, origin,
                            "ppo.");
    cfg.ppo.clip_eps = jd(p, "clip_eps", cfg.ppo.clip_eps, origin, "ppo.");
    cfg.ppo.batch_size = ji(p, "batch_size", cfg.ppo.batch_size, origin,
                            "ppo.");
    cfg.ppo.n_epochs = ji(p, "n_epochs", cfg.ppo.n_epochs, origin, "ppo.");
    cfg.ppo.entropy_coef =
        jd(p, "entropy_coef", cfg.ppo.entropy_coef, origin, "ppo.");
    cfg.ppo.value_coef = jd(p, "value_coef", cfg.ppo.value_coef, origin,
                            "ppo.");
    cfg.ppo.max_grad_norm =
        jd(p, "max_grad_norm", cfg.ppo.max_grad_norm, origin, "ppo.");
    cfg.ppo.total_episodes =
        ji(p, "total_episodes", cfg.ppo.total_episodes, origin, "ppo.");
    cfg.ppo.update_frequency =
        ji(p, "update_frequency", cfg.ppo.update_frequency, origin, "ppo.");
    cfg.ppo.normalize_advantages =
        jb(p, "normalize_advantages", cfg.ppo.normalize_advantages, origin,
           "ppo.");
    cfg.ppo.checkpoint_interval =
        ji(p, "checkpoint_interval", cfg.ppo.checkpoint_interval, origin,
           "ppo.");
  }
  if (j.contains("metrics")) {
    const auto& m = j["metrics"];
    check_keys(m, origin, "metrics.",
               {"coverage_threshold", "population_threshold",
                "source_radius_cells", "industrial_source_threshold"});
    cfg.metrics.coverage_threshold =
        jd(m, "coverage_threshold", cfg.metrics.coverage_threshold, origin,
           "metrics.");
    cfg.metrics.population_threshold =
        jd(m, "population_threshold", cfg.metrics.population_threshold, origin,
           "metrics.");
    cfg.metrics.source_radius_cells =
        jd(m, "source_radius_cells", cfg.metrics.source_radius_cells, origin,
           "metrics.");
    cfg.metrics.industrial_source_threshold =
        jd(m, "industrial_source_threshold",
           cfg.metrics.industrial_source_threshold, origin, "metrics.");
  }
  if (j.contains("strategies")) {
    const auto& s = j["strategies"];
    check_keys(s, origin, "strategies.",
               {"greedy_mode", "greedy_ignores_green"});
    cfg.strategy.greedy_mode = greedy_mode_from(
        js(s, "greedy_mode", greedy_mode_name(cfg.strategy.greedy_mode), origin,
           "strategies."),
        origin, "strategies.");
    cfg.strategy.greedy_ignores_green =
        jb(s, "greedy_ignores_green", cfg.strategy.greedy_ignores_green, origin,
           "strategies.");
  }
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    check_keys(s, origin, "seeds.", {"synth", "train", "placement"});
    cfg.seeds.synth = ju(s, "synth", cfg.seeds.synth, origin, "seeds.");
    cfg.seeds.train = ju(s, "train", cfg.seeds.train, origin, "seeds.");
    cfg.seeds.placement =
        ju(s, "placement", cfg.seeds.placement, origin, "seeds.");
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    check_keys(p, origin, "paths.", {"stations", "sites", "output_dir"});
    cfg.paths.stations = js(p, "stations", cfg.paths.stations, origin,
                            "paths.");
    cfg.paths.sites = js(p, "sites", cfg.paths.sites, origin, "paths.");
    cfg.paths.output_dir =
        js(p, "output_dir", cfg.paths.output_dir, origin, "paths.");
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(text, path);
}

std::string config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["grid"] = {{"width", cfg.grid.width},
               {"height", cfg.grid.height},
               {"lat_min", cfg.grid.lat_min},
               {"lat_max", cfg.grid.lat_max},
               {"lon_min", cfg.grid.lon_min},
               {"lon_max", cfg.grid.lon_max}};
  j["synthetic"] = {{"seed", cfg.synthetic.seed},
                    {"stations", cfg.synthetic.n_stations},
                    {"population_sites", cfg.synthetic.n_pop_sites},
                    {"traffic_sites", cfg.synthetic.n_traffic_sites},
                    {"industrial_sites", cfg.synthetic.n_industrial_sites},
                    {"green_sites", cfg.synthetic.n_green_sites},
                    {"hotspot_intensity", cfg.synthetic.hotspot_intensity}};
  j["ingest"] = {{"impute_radius_km", cfg.impute_radius_km}};
  ordered_json inf;
  for (std::size_t i = 0; i < 4; ++i) {
    const InfluenceChannelConfig& ch = cfg.influence[i];
    inf[ingest::feature_kind_name(kKinds[i])] = {
        {"shape", shape_name(ch.shape)},
        {"combine", combine_name(ch.combine)},
        {"weight", ch.kernel.weight},
        {"sigma_cells", ch.kernel.sigma_cells},
        {"magnitude_scale", ch.magnitude_scale}};
  }
  j["influence"] = inf;
  j["booth"] = {{"alpha", cfg.booth.alpha},
                {"sigma_booth", cfg.booth.sigma_booth}};
  j["constraints"] = {{"d_min_km", cfg.constraints.d_min_km},
                      {"rho_min", cfg.constraints.rho_min},
                      {"delta_aqi_min", cfg.constraints.delta_aqi_min},
                      {"green_threshold", cfg.constraints.green_threshold},
                      {"max_booths", cfg.constraints.max_booths}};
  j["rewards"] = {{"w_local", cfg.rewards.w_local},
                  {"w_global", cfg.rewards.w_global},
                  {"w_population", cfg.rewards.w_population},
                  {"w_traffic", cfg.rewards.w_traffic},
                  {"w_industrial", cfg.rewards.w_industrial},
                  {"penalty_distance", cfg.rewards.penalty_distance},
                  {"penalty_greenspace", cfg.rewards.penalty_greenspace},
                  {"penalty_max_booths", cfg.rewards.penalty_max_booths},
                  {"penalty_population", cfg.rewards.penalty_population},
                  {"penalty_improvement", cfg.rewards.penalty_improvement}};
  j["episode"] = {{"max_steps", cfg.episode.max_steps},
                  {"reward_scaling", cfg.episode.reward_scaling},
                  {"action_penalty", cfg.episode.action_penalty},
                  {"masking", cfg.episode.masking}};
  j["ppo"] = {{"lr", cfg.ppo.lr},
              {"gamma", cfg.ppo.gamma},
              {"gae_lambda", cfg.ppo.gae_lambda},
              {"clip_eps", cfg.ppo.clip_eps},
              {"batch_size", cfg.ppo.batch_size},
              {"n_epochs", cfg.ppo.n_epochs},
              {"entropy_coef", cfg.ppo.entropy_coef},
              {"value_coef", cfg.ppo.value_coef},
              {"max_grad_norm", cfg.ppo.max_grad_norm},
              {"total_episodes", cfg.ppo.total_episodes},
              {"update_frequency", cfg.ppo.update_frequency},
              {"normalize_advantages", cfg.ppo.normalize_advantages},
              {"checkpoint_interval", cfg.ppo.checkpoint_interval}};
  j["metrics"] = {{"coverage_threshold", cfg.metrics.coverage_threshold},
                  {"population_threshold", cfg.metrics.population_threshold},
                  {"source_radius_cells", cfg.metrics.source_radius_cells},
                  {"industrial_source_threshold",
                   cfg.metrics.industrial_source_threshold}};
  j["strategies"] = {
      {"greedy_mode", greedy_mode_name(cfg.strategy.greedy_mode)},
      {"greedy_ignores_green", cfg.strategy.greedy_ignores_green}};
  j["seeds"] = {{"synth", cfg.seeds.synth},
                {"train", cfg.seeds.train},
                {"placement", cfg.seeds.placement}};
  j["paths"] = {{"stations", cfg.paths.stations},
                {"sites", cfg.paths.sites},
                {"output_dir", cfg.paths.output_dir}};
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
  return manifest::sha256_hex(config_to_json(cfg));
}

void apply_seed_env(RunConfig& cfg) {
  const char* env = std::getenv("AEROGRID_SEED");
  if (env == nullptr || *env == '\0') return;
  std::uint64_t seed = 0;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) {
      throw std::invalid_argument("trailing characters");
    }
    seed = static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(std::string("AEROGRID_SEED must be an unsigned integer, got '") +
                      env + "'");
  }
  cfg.seeds.synth = seed;
  cfg.seeds.train = seed;
  cfg.seeds.placement = seed;
  cfg.synthetic.seed = seed;
}

metrics::MetricsConfig metrics_config(const RunConfig& cfg) {
  metrics::MetricsConfig m;
  m.coverage_threshold = cfg.metrics.coverage_threshold;
  m.population_threshold = cfg.metrics.population_threshold;
  m.source_radius_cells = cfg.metrics.source_radius_cells > 0.0
                              ? cfg.metrics.source_radius_cells
                              : 3.0 * cfg.booth.sigma_booth;
  m.industrial_source_threshold = cfg.metrics.industrial_source_threshold;
  m.constraints = cfg.constraints;
  m.booth_params = cfg.booth;
  return m;
}

neural::NetConfig net_config(const RunConfig& cfg) {
  neural::NetConfig n;
  n.height = cfg.grid.height;
  n.width = cfg.grid.width;
  n.seed = cfg.seeds.train;
  return n;
}

const InfluenceChannelConfig& channel_config(const RunConfig& cfg,
                                             ingest::FeatureKind kind) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (kKinds[i] == kind) return cfg.influence[i];
  }
  throw DomainError("unknown feature kind");
}

}  // namespace aerogrid::config
