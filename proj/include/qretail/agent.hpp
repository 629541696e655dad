#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qretail/common.hpp"
#include "qretail/network.hpp"
#include "qretail/replay.hpp"

namespace qretail {

struct AgentConfig {
  std::size_t n_actions = 0;
  std::vector<std::size_t> hidden_sizes;
  double gamma = 0.3;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.97;
  double epsilon_min = 0.01;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  // Gradient steps between target-network snapshots; 1 keeps the target
  // exactly one update behind.
  std::size_t target_sync_interval = 1;

  void validate() const {
    if (n_actions < 1) throw config_error("agent: n_actions must be >= 1");
    if (hidden_sizes.empty()) throw config_error("agent: hidden_sizes is empty");
    for (std::size_t h : hidden_sizes) {
      if (h < 1) throw config_error("agent: hidden layer size must be >= 1");
    }
    if (gamma < 0.0 || gamma > 1.0) throw config_error("agent: gamma must be in [0,1]");
    if (epsilon_start < 0.0 || epsilon_start > 1.0) {
      throw config_error("agent: epsilon_start must be in [0,1]");
    }
    if (epsilon_decay <= 0.0 || epsilon_decay > 1.0) {
      throw config_error("agent: epsilon_decay must be in (0,1]");
    }
    if (epsilon_min < 0.0 || epsilon_min > epsilon_start) {
      throw config_error("agent: epsilon_min must be in [0, epsilon_start]");
    }
    if (learning_rate <= 0.0) throw config_error("agent: learning_rate must be positive");
    if (batch_size < 1) throw config_error("agent: batch_size must be >= 1");
    if (target_sync_interval < 1) {
      throw config_error("agent: target_sync_interval must be >= 1");
    }
  }
};

/// Epsilon-greedy deep Q-learning agent. Holds the online network, a target
/// snapshot used for Bellman targets, and the exploration state.
class Agent {
 public:
  Agent(std::size_t state_dim, AgentConfig config, std::uint64_t net_seed,
        std::uint64_t rng_seed)
      : config_(std::move(config)),
        net_seed_(net_seed),
        rng_seed_(rng_seed),
        rng_(static_cast<std::mt19937::result_type>(rng_seed)) {
    config_.validate();
    if (state_dim < 1) throw config_error("agent: state_dim must be >= 1");
    std::vector<std::size_t> layer_sizes;
    layer_sizes.push_back(state_dim);
    layer_sizes.insert(layer_sizes.end(), config_.hidden_sizes.begin(),
                       config_.hidden_sizes.end());
    layer_sizes.push_back(config_.n_actions);
    online_ = init_network(layer_sizes, net_seed);
    target_ = online_;
    epsilon_ = config_.epsilon_start;
  }

  /// Rebuilds an agent around existing networks (model loading, tests).
  Agent(AgentConfig config, NetworkParams online, NetworkParams target,
        double epsilon, std::uint64_t gradient_steps, std::uint64_t net_seed,
        std::uint64_t rng_seed)
      : config_(std::move(config)),
        online_(std::move(online)),
        target_(std::move(target)),
        epsilon_(epsilon),
        gradient_steps_(gradient_steps),
        net_seed_(net_seed),
        rng_seed_(rng_seed),
        rng_(static_cast<std::mt19937::result_type>(rng_seed)) {
    config_.validate();
    if (online_.layer_sizes != target_.layer_sizes) {
      throw config_error("agent: online and target network shapes differ");
    }
    if (online_.output_dim() != config_.n_actions) {
      throw config_error("agent: network output dim != n_actions");
    }
    if (epsilon_ < 0.0 || epsilon_ > 1.0) {
      throw config_error("agent: epsilon outside [0,1]");
    }
  }

  /// Greedy action under the online network; ties break to the lowest index.
  int greedy_action(const StateVector& state) const {
    const ForwardTrace trace = forward(online_, state);
    const std::vector<double>& q = trace.output();
    std::size_t best = 0;
    for (std::size_t i = 1; i < q.size(); ++i) {
      if (q[i] > q[best]) best = i;
    }
    return static_cast<int>(best);
  }

  /// With probability epsilon a uniformly random action, otherwise greedy.
  /// epsilon == 0 consumes no randomness.
  int select_action(const StateVector& state) {
    if (state.size() != online_.input_dim()) {
      throw contract_error("select_action: state dimension mismatch");
    }
    if (epsilon_ > 0.0) {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(rng_) < epsilon_) {
        std::uniform_int_distribution<int> pick(
            0, static_cast<int>(config_.n_actions) - 1);
        return pick(rng_);
      }
    }
    return greedy_action(state);
  }

  /// y_k = r_k for terminal transitions, else r_k + gamma * max_a' Q_target.
  std::vector<double> compute_targets(const std::vector<Experience>& batch) const {
    if (batch.empty()) throw contract_error("compute_targets: empty batch");
    std::vector<double> targets(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const Experience& e = batch[k];
      if (e.terminal) {
        targets[k] = e.reward;
      } else {
        const ForwardTrace trace = forward(target_, e.next_state);
        const std::vector<double>& q = trace.output();
        targets[k] = e.reward +
                     config_.gamma * *std::max_element(q.begin(), q.end());
      }
    }
    return targets;
  }

  /// One masked-MSE Adam update on a uniformly sampled minibatch. Returns the
  /// mean squared error, or nothing while the buffer is still warming up.
  std::optional<double> train_step(ReplayBuffer& buffer) {
    if (buffer.size() < config_.batch_size) return std::nullopt;

    const std::mt19937 rng_before = rng_;
    std::vector<Experience> batch = buffer.sample(config_.batch_size, rng_);
    std::vector<double> targets = compute_targets(batch);

    Gradients grads = make_zero_gradients(online_);
    std::vector<bool> mask(config_.n_actions, false);
    std::vector<double> target_vec;
    double squared_error_sum = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const Experience& e = batch[k];
      ForwardTrace trace = forward(online_, e.state);
      const double diff = trace.output()[static_cast<std::size_t>(e.action)] -
                          targets[k];
      squared_error_sum += diff * diff;
      target_vec = trace.output();
      target_vec[static_cast<std::size_t>(e.action)] = targets[k];
      mask[static_cast<std::size_t>(e.action)] = true;
      backward_accumulate(online_, trace, target_vec, mask, grads);
      mask[static_cast<std::size_t>(e.action)] = false;
    }
    scale_gradients(grads, 1.0 / static_cast<double>(batch.size()));
    const double loss = squared_error_sum / static_cast<double>(batch.size());

    if (!std::isfinite(loss) || !gradients_finite(grads)) {
      rng_ = rng_before;  // leave the agent exactly as it was
      throw numeric_error("train_step: non-finite loss or gradient");
    }

    adam_step(online_, grads, config_.learning_rate);
    ++gradient_steps_;
    if (gradient_steps_ % config_.target_sync_interval == 0) {
      target_ = online_;
    }
    return loss;
  }

  /// Multiplicative decay with a floor; called once per episode.
  double decay_epsilon() {
    epsilon_ = std::max(config_.epsilon_min, epsilon_ * config_.epsilon_decay);
    return epsilon_;
  }

  const AgentConfig& config() const { return config_; }
  double epsilon() const { return epsilon_; }
  std::uint64_t gradient_steps() const { return gradient_steps_; }
  const NetworkParams& online() const { return online_; }
  const NetworkParams& target() const { return target_; }
  std::size_t state_dim() const { return online_.input_dim(); }
  std::uint64_t net_seed() const { return net_seed_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  void set_epsilon(double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) {
      throw contract_error("set_epsilon: value outside [0,1]");
    }
    epsilon_ = epsilon;
  }

  /// Full snapshot: config, exploration state, both networks, seed lineage.
  void save(std::ostream& out, std::uint64_t run_seed) const {
    out << "qretail_agent 1\n";
    out << "run_seed " << run_seed << '\n';
    out << "net_seed " << net_seed_ << '\n';
    out << "rng_seed " << rng_seed_ << '\n';
    out << "epsilon " << format_double_full(epsilon_) << '\n';
    out << "gradient_steps " << gradient_steps_ << '\n';
    out << "config.n_actions " << config_.n_actions << '\n';
    out << "config.hidden_sizes";
    for (std::size_t h : config_.hidden_sizes) out << ' ' << h;
    out << '\n';
    out << "config.gamma " << format_double_full(config_.gamma) << '\n';
    out << "config.epsilon_start " << format_double_full(config_.epsilon_start) << '\n';
    out << "config.epsilon_decay " << format_double_full(config_.epsilon_decay) << '\n';
    out << "config.epsilon_min " << format_double_full(config_.epsilon_min) << '\n';
    out << "config.learning_rate " << format_double_full(config_.learning_rate) << '\n';
    out << "config.batch_size " << config_.batch_size << '\n';
    out << "config.target_sync_interval " << config_.target_sync_interval << '\n';
    save_network(out, online_, "online");
    save_network(out, target_, "target");
  }

  struct Loaded;
  static Loaded load(std::istream& in);

 private:
  AgentConfig config_;
  NetworkParams online_;
  NetworkParams target_;
  double epsilon_ = 1.0;
  std::uint64_t gradient_steps_ = 0;
  std::uint64_t net_seed_ = 0;
  std::uint64_t rng_seed_ = 0;
  std::mt19937 rng_;
};

struct Agent::Loaded {
  Agent agent;
  std::uint64_t run_seed = 0;
};

inline Agent::Loaded Agent::load(std::istream& in) {
  KvDocument doc = read_kv_document(in);
  if (kv_require(doc, "qretail_agent") != "1") {
    throw data_error("unsupported agent file version");
  }
  AgentConfig config;
  config.n_actions = parse_uint(kv_require(doc, "config.n_actions"));
  for (const std::string& f :
       split_fields(kv_require(doc, "config.hidden_sizes"))) {
    config.hidden_sizes.push_back(static_cast<std::size_t>(parse_uint(f)));
  }
  config.gamma = parse_double(kv_require(doc, "config.gamma"));
  config.epsilon_start = parse_double(kv_require(doc, "config.epsilon_start"));
  config.epsilon_decay = parse_double(kv_require(doc, "config.epsilon_decay"));
  config.epsilon_min = parse_double(kv_require(doc, "config.epsilon_min"));
  config.learning_rate = parse_double(kv_require(doc, "config.learning_rate"));
  config.batch_size = parse_uint(kv_require(doc, "config.batch_size"));
  config.target_sync_interval =
      parse_uint(kv_require(doc, "config.target_sync_interval"));

  NetworkParams online = load_network(doc, "online");
  NetworkParams target = load_network(doc, "target");

  Agent agent(std::move(config), std::move(online), std::move(target),
              parse_double(kv_require(doc, "epsilon")),
              parse_uint(kv_require(doc, "gradient_steps")),
              parse_uint(kv_require(doc, "net_seed")),
              parse_uint(kv_require(doc, "rng_seed")));
  return Loaded{std::move(agent), parse_uint(kv_require(doc, "run_seed"))};
}

}  // namespace qretail
