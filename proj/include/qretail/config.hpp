#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qretail/agent.hpp"
#include "qretail/common.hpp"
#include "qretail/pricing_env.hpp"
#include "qretail/supply_env.hpp"

namespace qretail {

enum class Scenario { pricing, supply };

inline std::string to_string(Scenario s) {
  return s == Scenario::pricing ? "pricing" : "supply";
}

/// Everything one run needs: scenario, agent, environment, schedule, seed.
struct RunConfig {
  Scenario scenario = Scenario::pricing;
  AgentConfig agent;
  std::size_t replay_capacity = 10000;
  PricingConfig pricing;
  SupplyConfig supply;
  std::size_t episodes = 50;
  std::uint64_t seed = 0;
  std::string data_path;  // supply only; empty means synthetic demand
  std::size_t synth_days = 1050;
  std::string out_dir = "out";

  void validate() const {
    agent.validate();
    if (scenario == Scenario::pricing) {
      pricing.validate();
      if (agent.n_actions != pricing.actions.size()) {
        throw config_error("config: n_actions out of sync with env actions");
      }
    } else {
      supply.validate();
      if (agent.n_actions != supply.actions.size()) {
        throw config_error("config: n_actions out of sync with env actions");
      }
      if (data_path.empty() &&
          synth_days < supply.lag_max + supply.episode_len) {
        throw config_error("config: synth_days must cover lag_max + episode_len");
      }
    }
    if (replay_capacity < agent.batch_size) {
      throw config_error("config: replay_capacity must be >= batch_size");
    }
  }
};

/// Published parameter sets for the two case studies.
inline RunConfig default_run_config(Scenario scenario) {
  RunConfig config;
  config.scenario = scenario;
  if (scenario == Scenario::pricing) {
    config.pricing = PricingConfig{};
    config.agent.n_actions = config.pricing.actions.size();
    config.agent.hidden_sizes = {32, 32};
    config.agent.epsilon_decay = 0.97;
    config.episodes = 50;
  } else {
    config.supply = SupplyConfig{};
    config.agent.n_actions = config.supply.actions.size();
    config.agent.hidden_sizes = {64, 64};
    config.agent.epsilon_decay = 0.995;
    config.episodes = 300;
  }
  config.agent.gamma = 0.3;
  config.agent.epsilon_start = 1.0;
  config.agent.epsilon_min = 0.01;
  config.agent.learning_rate = 1e-3;
  config.agent.batch_size = 32;
  config.agent.target_sync_interval = 1;
  return config;
}

namespace detail {

struct IniLine {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line_no = 0;
};

inline std::vector<IniLine> parse_ini(std::istream& in, const std::string& name) {
  std::vector<IniLine> lines;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto comment = raw.find_first_of("#;");
    std::string stripped = trim(comment == std::string::npos
                                    ? raw
                                    : raw.substr(0, comment));
    if (stripped.empty()) continue;
    const std::string where = name + " line " + std::to_string(line_no);
    if (stripped.front() == '[') {
      if (stripped.back() != ']' || stripped.size() < 3) {
        throw config_error(where + ": malformed section header");
      }
      section = trim(stripped.substr(1, stripped.size() - 2));
      continue;
    }
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw config_error(where + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw config_error(where + ": key outside any [section]");
    }
    IniLine line;
    line.section = section;
    line.key = trim(stripped.substr(0, eq));
    line.value = trim(stripped.substr(eq + 1));
    line.line_no = line_no;
    if (line.key.empty()) throw config_error(where + ": empty key");
    lines.push_back(std::move(line));
  }
  return lines;
}

inline bool parse_bool(const std::string& value, const std::string& where) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw config_error(where + ": expected true/false, got '" + value + "'");
}

template <typename T>
std::vector<T> parse_number_list(const std::string& value,
                                 const std::string& where) {
  std::vector<T> out;
  for (const std::string& field : split_fields(value)) {
    try {
      if constexpr (std::is_floating_point_v<T>) {
        out.push_back(parse_double(field));
      } else {
        out.push_back(static_cast<T>(parse_int(field)));
      }
    } catch (const data_error& e) {
      throw config_error(where + ": " + e.what());
    }
  }
  if (out.empty()) throw config_error(where + ": empty list");
  return out;
}

}  // namespace detail

/// Parses the run-configuration document. Unknown sections or keys are
/// errors; anything omitted keeps the scenario's published default.
inline RunConfig parse_run_config(std::istream& in, const std::string& name) {
  std::vector<detail::IniLine> lines = detail::parse_ini(in, name);

  Scenario scenario = Scenario::pricing;
  bool scenario_seen = false;
  for (const detail::IniLine& line : lines) {
    if (line.section == "run" && line.key == "scenario") {
      if (line.value == "pricing") {
        scenario = Scenario::pricing;
      } else if (line.value == "supply") {
        scenario = Scenario::supply;
      } else {
        throw config_error(name + " line " + std::to_string(line.line_no) +
                           ": scenario must be 'pricing' or 'supply'");
      }
      scenario_seen = true;
    }
  }
  if (!scenario_seen) {
    throw config_error(name + ": missing required key [run] scenario");
  }

  RunConfig config = default_run_config(scenario);
  for (const detail::IniLine& line : lines) {
    const std::string where =
        name + " line " + std::to_string(line.line_no) + " (" + line.section +
        "." + line.key + ")";
    try {
      if (line.section == "run") {
        if (line.key == "scenario") {
          // handled above
        } else if (line.key == "episodes") {
          config.episodes = parse_uint(line.value);
        } else if (line.key == "seed") {
          config.seed = parse_uint(line.value);
        } else if (line.key == "out_dir") {
          config.out_dir = line.value;
        } else if (line.key == "data_path") {
          config.data_path = line.value;
        } else if (line.key == "synth_days") {
          config.synth_days = parse_uint(line.value);
        } else {
          throw config_error(where + ": unknown key");
        }
      } else if (line.section == "agent") {
        if (line.key == "hidden_sizes") {
          config.agent.hidden_sizes =
              detail::parse_number_list<std::size_t>(line.value, where);
        } else if (line.key == "gamma") {
          config.agent.gamma = parse_double(line.value);
        } else if (line.key == "epsilon_start") {
          config.agent.epsilon_start = parse_double(line.value);
        } else if (line.key == "epsilon_decay") {
          config.agent.epsilon_decay = parse_double(line.value);
        } else if (line.key == "epsilon_min") {
          config.agent.epsilon_min = parse_double(line.value);
        } else if (line.key == "learning_rate") {
          config.agent.learning_rate = parse_double(line.value);
        } else if (line.key == "batch_size") {
          config.agent.batch_size = parse_uint(line.value);
        } else if (line.key == "target_sync_interval") {
          config.agent.target_sync_interval = parse_uint(line.value);
        } else if (line.key == "replay_capacity") {
          config.replay_capacity = parse_uint(line.value);
        } else {
          throw config_error(where + ": unknown key");
        }
      } else if (line.section == "env") {
        if (scenario == Scenario::pricing) {
          PricingConfig& env = config.pricing;
          if (line.key == "price_m") {
            env.price_m = parse_double(line.value);
          } else if (line.key == "a") {
            env.a = parse_double(line.value);
          } else if (line.key == "b") {
            env.b = parse_double(line.value);
          } else if (line.key == "c") {
            env.c = parse_double(line.value);
          } else if (line.key == "d") {
            env.d = parse_double(line.value);
          } else if (line.key == "actions") {
            env.actions = detail::parse_number_list<double>(line.value, where);
          } else if (line.key == "episode_len") {
            env.episode_len = parse_uint(line.value);
          } else if (line.key == "demand_low") {
            env.demand_low = parse_double(line.value);
          } else if (line.key == "demand_high") {
            env.demand_high = parse_double(line.value);
          } else {
            throw config_error(where + ": unknown key for pricing env");
          }
        } else {
          SupplyConfig& env = config.supply;
          if (line.key == "actions") {
            env.actions = detail::parse_number_list<int>(line.value, where);
          } else if (line.key == "pack_unit") {
            env.pack_unit = parse_double(line.value);
          } else if (line.key == "price_profit") {
            env.price_profit = parse_double(line.value);
          } else if (line.key == "price_support") {
            env.price_support = parse_double(line.value);
          } else if (line.key == "episode_len") {
            env.episode_len = parse_uint(line.value);
          } else if (line.key == "lag_max") {
            env.lag_max = parse_uint(line.value);
          } else if (line.key == "stop_reward") {
            env.stop_reward = parse_double(line.value);
          } else if (line.key == "include_stock_feature") {
            env.include_stock_feature = detail::parse_bool(line.value, where);
          } else {
            throw config_error(where + ": unknown key for supply env");
          }
        }
      } else {
        throw config_error(where + ": unknown section [" + line.section + "]");
      }
    } catch (const data_error& e) {
      throw config_error(where + ": " + e.what());
    }
  }

  config.agent.n_actions = scenario == Scenario::pricing
                               ? config.pricing.actions.size()
                               : config.supply.actions.size();
  config.validate();
  return config;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  return parse_run_config(in, path);
}

/// Renders the effective configuration back into the same document format;
/// the result parses to an equal RunConfig. The output directory is runtime
/// plumbing, not run semantics, so it is left out and the echo is
/// byte-identical across destinations.
inline std::string render_run_config(const RunConfig& config) {
  std::ostringstream out;
  out << "# effective configuration\n";
  out << "[run]\n";
  out << "scenario = " << to_string(config.scenario) << '\n';
  out << "episodes = " << config.episodes << '\n';
  out << "seed = " << config.seed << '\n';
  if (!config.data_path.empty()) out << "data_path = " << config.data_path << '\n';
  if (config.scenario == Scenario::supply) {
    out << "synth_days = " << config.synth_days << '\n';
  }
  out << "\n[agent]\n";
  out << "hidden_sizes =";
  for (std::size_t h : config.agent.hidden_sizes) out << ' ' << h;
  out << '\n';
  out << "gamma = " << format_double(config.agent.gamma) << '\n';
  out << "epsilon_start = " << format_double(config.agent.epsilon_start) << '\n';
  out << "epsilon_decay = " << format_double(config.agent.epsilon_decay) << '\n';
  out << "epsilon_min = " << format_double(config.agent.epsilon_min) << '\n';
  out << "learning_rate = " << format_double(config.agent.learning_rate) << '\n';
  out << "batch_size = " << config.agent.batch_size << '\n';
  out << "target_sync_interval = " << config.agent.target_sync_interval << '\n';
  out << "replay_capacity = " << config.replay_capacity << '\n';
  out << "\n[env]\n";
  if (config.scenario == Scenario::pricing) {
    const PricingConfig& env = config.pricing;
    out << "price_m = " << format_double(env.price_m) << '\n';
    out << "a = " << format_double(env.a) << '\n';
    out << "b = " << format_double(env.b) << '\n';
    out << "c = " << format_double(env.c) << '\n';
    out << "d = " << format_double(env.d) << '\n';
    out << "actions =";
    for (double a : env.actions) out << ' ' << format_double(a);
    out << '\n';
    out << "episode_len = " << env.episode_len << '\n';
    out << "demand_low = " << format_double(env.demand_low) << '\n';
    out << "demand_high = " << format_double(env.demand_high) << '\n';
  } else {
    const SupplyConfig& env = config.supply;
    out << "actions =";
    for (int a : env.actions) out << ' ' << a;
    out << '\n';
    out << "pack_unit = " << format_double(env.pack_unit) << '\n';
    out << "price_profit = " << format_double(env.price_profit) << '\n';
    out << "price_support = " << format_double(env.price_support) << '\n';
    out << "episode_len = " << env.episode_len << '\n';
    out << "lag_max = " << env.lag_max << '\n';
    out << "stop_reward = " << format_double(env.stop_reward) << '\n';
    out << "include_stock_feature = "
        << (env.include_stock_feature ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace qretail
