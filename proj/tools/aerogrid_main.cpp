#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aerogrid/booth.hpp"
#include "aerogrid/config.hpp"
#include "aerogrid/errors.hpp"
#include "aerogrid/pipeline.hpp"

namespace {

using aerogrid::booth::StrategyKind;

int run(const CLI::App& app, aerogrid::config::RunConfig cfg,
        const std::string& strategy, bool self_check) {
  using namespace aerogrid;
  if (app.got_subcommand("synth")) {
    pipeline::cmd_synth(cfg);
    std::cout << "synthesized city into " << cfg.paths.output_dir << "\n";
  } else if (app.got_subcommand("ingest")) {
    pipeline::cmd_ingest(cfg, self_check);
    std::cout << "wrote channel grids into " << cfg.paths.output_dir << "\n";
  } else if (app.got_subcommand("train")) {
    ppo::TrainLog log = pipeline::cmd_train(cfg);
    double last = log.episodes.empty() ? 0.0 : log.episodes.back().reward;
    std::cout << "trained " << log.episodes.size()
              << " episodes; final episode reward " << last << "\n";
  } else if (app.got_subcommand("place")) {
    StrategyKind kind = booth::strategy_from_name(strategy);
    booth::Placement p = pipeline::cmd_place(cfg, kind);
    std::cout << "placed " << p.size() << " booths with strategy " << strategy
              << "\n";
  } else if (app.got_subcommand("evaluate")) {
    StrategyKind kind = booth::strategy_from_name(strategy);
    pipeline::cmd_evaluate(cfg, kind);
    std::cout << "wrote " << pipeline::report_file(kind) << " into "
              << cfg.paths.output_dir << "\n";
  } else if (app.got_subcommand("compare")) {
    pipeline::cmd_compare(cfg);
    std::cout << "wrote " << pipeline::kComparisonFile << " and radar.svg into "
              << cfg.paths.output_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained air-purification booth placement pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::string strategy = "random";
  std::uint64_t seed = 0;
  bool self_check = false;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--output-dir", output_dir, "Override the output directory");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Override every configured seed");

  app.add_subcommand("synth", "Generate a synthetic city (stations + sites)");
  CLI::App* ingest =
      app.add_subcommand("ingest", "Build the six channel grids");
  ingest->add_flag("--self-check", self_check,
                   "Verify the fused AQI dominates its inputs");
  app.add_subcommand("train", "Train the placement policy");
  CLI::App* place = app.add_subcommand("place", "Compute a booth placement");
  place->add_option("--strategy", strategy, "random|greedy|ppo")
      ->required()
      ->check(CLI::IsMember({"random", "greedy", "ppo"}));
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score an existing placement");
  evaluate->add_option("--strategy", strategy, "random|greedy|ppo")
      ->required()
      ->check(CLI::IsMember({"random", "greedy", "ppo"}));
  app.add_subcommand("compare", "Evaluate all strategies side by side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    aerogrid::config::RunConfig cfg =
        config_path.empty() ? aerogrid::config::default_config()
                            : aerogrid::config::load_config(config_path);
    if (!output_dir.empty()) cfg.paths.output_dir = output_dir;
    if (seed_opt->count() > 0) {
      cfg.seeds.synth = seed;
      cfg.seeds.train = seed;
      cfg.seeds.placement = seed;
      cfg.synthetic.seed = seed;
    }
    aerogrid::config::apply_seed_env(cfg);
    cfg.validate();
    return run(app, std::move(cfg), strategy, self_check);
  } catch (const aerogrid::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
