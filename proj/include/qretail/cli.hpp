#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qretail/agent.hpp"
#include "qretail/config.hpp"
#include "qretail/demand.hpp"
#include "qretail/pricing_env.hpp"
#include "qretail/report.hpp"
#include "qretail/supply_env.hpp"
#include "qretail/trainer.hpp"

namespace qretail::cli {

/// Sub-seeds drawn from the run seed in a fixed order, so every component
/// gets an independent deterministic stream.
struct SeedLineage {
  std::uint64_t run_seed = 0;
  std::uint64_t net_seed = 0;
  std::uint64_t agent_rng_seed = 0;
  std::uint64_t env_seed = 0;
  std::uint64_t synth_seed = 0;
};

inline SeedLineage derive_seeds(std::uint64_t run_seed) {
  std::mt19937_64 master(run_seed);
  SeedLineage seeds;
  seeds.run_seed = run_seed;
  seeds.net_seed = master();
  seeds.agent_rng_seed = master();
  seeds.env_seed = master();
  seeds.synth_seed = master();
  return seeds;
}

inline DemandSeries demand_for_run(const RunConfig& config,
                                   const SeedLineage& seeds) {
  if (!config.data_path.empty()) {
    return normalize(load_demand_csv(config.data_path));
  }
  return synth_generate(seeds.synth_seed, config.synth_days);
}

namespace detail {

inline void print_action_histogram(std::ostream& out,
                                   const std::vector<std::size_t>& counts) {
  for (std::size_t a = 0; a < counts.size(); ++a) {
    out << "  action " << a << ": " << counts[a] << '\n';
  }
}

}  // namespace detail

inline std::size_t state_dim_for(const RunConfig& config) {
  if (config.scenario == Scenario::pricing) return 2;
  return config.supply.include_stock_feature ? 10 : 9;
}

inline int run_train(const RunConfig& config) {
  const SeedLineage seeds = derive_seeds(config.seed);
  Agent agent(state_dim_for(config), config.agent, seeds.net_seed,
              seeds.agent_rng_seed);
  ReplayBuffer buffer(config.replay_capacity);

  TrainingReport report;
  if (config.scenario == Scenario::pricing) {
    PricingEnv env(config.pricing, seeds.env_seed);
    report = run_training(env, agent, buffer, config.episodes, config.seed);
  } else {
    SupplyEnv env(config.supply, demand_for_run(config, seeds), seeds.env_seed);
    report = run_training(env, agent, buffer, config.episodes, config.seed);
  }

  Manifest manifest = write_report(report, agent, config, config.out_dir);
  std::cout << "wrote " << manifest.files.size() + 1 << " files to "
            << config.out_dir << " (episodes=" << report.episodes.size()
            << ", wall=" << format_double(report.wall_seconds) << "s)\n";
  if (!report.episodes.empty()) {
    const EpisodeMetrics& last = report.episodes.back();
    std::cout << "final episode: mean_reward="
              << format_double(last.mean_reward)
              << " epsilon=" << format_double(last.epsilon) << '\n';
  }
  if (!report.ok()) {
    std::cerr << "error: training truncated: " << report.error << '\n';
    return 1;
  }
  return 0;
}

inline int run_evaluate(const std::string& run_dir, std::size_t episodes,
                        std::optional<std::uint64_t> seed_override) {
  const std::filesystem::path dir(run_dir);
  std::ifstream model_in(dir / "model.txt");
  if (!model_in) {
    throw data_error("cannot open '" + (dir / "model.txt").string() + "'");
  }
  Agent::Loaded loaded = Agent::load(model_in);
  RunConfig config = load_run_config((dir / "config_echo.ini").string());

  const std::uint64_t seed = seed_override.value_or(loaded.run_seed);
  const SeedLineage seeds = derive_seeds(seed);

  EvaluationSummary summary;
  if (config.scenario == Scenario::pricing) {
    PricingEnv env(config.pricing, seeds.env_seed);
    summary = evaluate_policy(env, loaded.agent, episodes);
  } else {
    SupplyEnv env(config.supply, demand_for_run(config, seeds), seeds.env_seed);
    summary = evaluate_policy(env, loaded.agent, episodes);
  }

  std::cout << "greedy evaluation over " << summary.episodes << " episodes ("
            << summary.total_steps << " steps)\n";
  std::cout << "mean episode reward: "
            << format_double(summary.mean_episode_reward) << '\n';
  std::cout << "mean step reward: " << format_double(summary.mean_step_reward)
            << '\n';
  detail::print_action_histogram(std::cout, summary.action_counts);
  return 0;
}

inline int run_oracle(const RunConfig& config) {
  if (config.scenario != Scenario::pricing) {
    throw config_error("oracle: requires a pricing configuration");
  }
  const PricingOracle oracle = oracle_optimal_action(config.pricing);
  std::cout << "action_index,extra_price,profit_factor\n";
  for (std::size_t i = 0; i < config.pricing.actions.size(); ++i) {
    std::cout << i << ',' << format_double(config.pricing.actions[i]) << ','
              << format_double(oracle.table[i]) << '\n';
  }
  std::cout << "optimal: action " << oracle.action << " (extra price "
            << format_double(
                   config.pricing.actions[static_cast<std::size_t>(oracle.action)])
            << ", profit factor " << format_double(oracle.value) << ")\n";
  return 0;
}

inline int run_synth_data(const std::string& out_path, std::size_t days,
                          std::uint64_t seed) {
  const DemandSeries series = synth_generate(seed, days);
  std::ostringstream content;
  save_demand_csv(content, series);
  const std::filesystem::path path(out_path);
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  qretail::detail::write_file_atomic(path, content.str());
  std::cout << "wrote " << series.size() << " days to " << out_path << '\n';
  return 0;
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{"deep Q-learning toolkit for retail pricing and supply runs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> episodes_override;

  CLI::App* train = app.add_subcommand("train", "train an agent and export run data");
  train->add_option("--config", config_path, "run configuration file")->required();
  train->add_option("--out", out_override, "output directory (overrides config)");
  train->add_option("--seed", seed_override, "run seed (overrides config)");
  train->add_option("--episodes", episodes_override, "episode count (overrides config)");

  std::string eval_dir;
  std::size_t eval_episodes = 50;
  std::optional<std::uint64_t> eval_seed;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "greedy rollouts of a trained run directory");
  evaluate->add_option("--out", eval_dir, "run directory holding model.txt")->required();
  evaluate->add_option("--episodes", eval_episodes, "evaluation episodes");
  evaluate->add_option("--seed", eval_seed, "evaluation seed (default: run seed)");

  std::string oracle_config;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "tabulate expected profit factor per pricing action");
  oracle->add_option("--config", oracle_config, "pricing configuration file")->required();

  std::string synth_out;
  std::size_t synth_days = 1050;
  std::uint64_t synth_seed = 0;
  CLI::App* synth = app.add_subcommand("synth-data", "write a synthetic demand CSV");
  synth->add_option("--out", synth_out, "output CSV path")->required();
  synth->add_option("--days", synth_days, "number of days");
  synth->add_option("--seed", synth_seed, "generator seed");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand(
      "validate-config", "parse a configuration and echo the effective values");
  validate->add_option("--config", validate_path, "run configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train->parsed()) {
      RunConfig config = load_run_config(config_path);
      if (!out_override.empty()) config.out_dir = out_override;
      if (seed_override) config.seed = *seed_override;
      if (episodes_override) config.episodes = *episodes_override;
      config.validate();
      return run_train(config);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_dir, eval_episodes, eval_seed);
    }
    if (oracle->parsed()) {
      return run_oracle(load_run_config(oracle_config));
    }
    if (synth->parsed()) {
      return run_synth_data(synth_out, synth_days, synth_seed);
    }
    if (validate->parsed()) {
      RunConfig config = load_run_config(validate_path);
      std::cout << render_run_config(config);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

/// Convenience entry for in-process invocations (tests drive this).
inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qretail");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qretail::cli
