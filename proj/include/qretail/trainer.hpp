#pragma once

#include <chrono>
#include <concepts>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qretail/agent.hpp"
#include "qretail/common.hpp"
#include "qretail/replay.hpp"
#include "qretail/supply_env.hpp"

namespace qretail {

template <typename E>
concept Environment = requires(E& env, int action) {
  { env.reset() } -> std::same_as<StateVector>;
  { env.step(action) } -> std::same_as<StepResult>;
  { std::as_const(env).state_dim() } -> std::convertible_to<std::size_t>;
  { std::as_const(env).action_count() } -> std::convertible_to<std::size_t>;
};

/// Environments that expose per-day traces and a weekday, i.e. the supply
/// case. The trainer records extra reporting series for these.
template <typename E>
concept TracedEnvironment = Environment<E> && requires(const E& env) {
  { env.trace() } -> std::convertible_to<const EpisodeTrace&>;
  { env.current_weekday() } -> std::convertible_to<int>;
};

struct EpisodeMetrics {
  std::size_t episode = 0;
  double mean_reward = 0.0;
  double total_reward = 0.0;
  double epsilon = 0.0;  // exploration probability at episode start
  double mean_loss = 0.0;  // 0 when no update ran this episode
  std::size_t steps = 0;
  std::vector<std::size_t> action_counts;
  std::vector<int> actions;  // in the order taken
  // Supply runs only:
  EpisodeTrace trace;
  std::vector<std::size_t> weekday_action_counts;  // 7 x n_actions, row-major
};

struct TrainingReport {
  std::vector<EpisodeMetrics> episodes;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  bool has_traces = false;
  std::string error;  // non-empty when the run was truncated

  bool ok() const { return error.empty(); }
};

struct EvaluationSummary {
  std::size_t episodes = 0;
  std::size_t total_steps = 0;
  double mean_episode_reward = 0.0;
  double mean_step_reward = 0.0;
  std::vector<std::size_t> action_counts;
  // Supply runs only:
  bool has_traces = false;
  EpisodeTrace last_trace;
  std::vector<std::size_t> weekday_action_counts;
};

namespace detail {

template <typename E>
void check_dimensions(const E& env, const Agent& agent) {
  if (env.state_dim() != agent.state_dim()) {
    throw config_error("trainer: env state dim " +
                       std::to_string(env.state_dim()) +
                       " != agent input dim " +
                       std::to_string(agent.state_dim()));
  }
  if (env.action_count() != agent.config().n_actions) {
    throw config_error("trainer: env action count " +
                       std::to_string(env.action_count()) +
                       " != agent n_actions " +
                       std::to_string(agent.config().n_actions));
  }
}

}  // namespace detail

/// The episode loop: collect experience, train once per environment step
/// (after warm-up), decay epsilon once per episode, record metrics.
/// Deterministic given the seeds baked into env and agent.
template <Environment E>
TrainingReport run_training(E& env, Agent& agent, ReplayBuffer& buffer,
                            std::size_t episodes, std::uint64_t seed = 0) {
  detail::check_dimensions(env, agent);
  const std::size_t n_actions = env.action_count();
  const auto start = std::chrono::steady_clock::now();

  TrainingReport report;
  report.seed = seed;
  report.has_traces = TracedEnvironment<E>;

  for (std::size_t ep = 0; ep < episodes; ++ep) {
    EpisodeMetrics metrics;
    metrics.episode = ep;
    metrics.epsilon = agent.epsilon();
    metrics.action_counts.assign(n_actions, 0);
    if constexpr (TracedEnvironment<E>) {
      metrics.weekday_action_counts.assign(7 * n_actions, 0);
    }

    StateVector state = env.reset();
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    bool done = false;
    bool failed = false;
    while (!done) {
      int weekday = 0;
      if constexpr (TracedEnvironment<E>) weekday = env.current_weekday();

      const int action = agent.select_action(state);
      StepResult result = env.step(action);
      buffer.push(Experience{state, action, result.reward,
                             result.state, result.done});

      metrics.total_reward += result.reward;
      metrics.actions.push_back(action);
      metrics.action_counts[static_cast<std::size_t>(action)] += 1;
      metrics.steps += 1;
      if constexpr (TracedEnvironment<E>) {
        metrics.weekday_action_counts[static_cast<std::size_t>(weekday) *
                                          n_actions +
                                      static_cast<std::size_t>(action)] += 1;
      }

      try {
        if (auto loss = agent.train_step(buffer)) {
          loss_sum += *loss;
          ++loss_count;
        }
      } catch (const numeric_error& e) {
        report.error = e.what();
        failed = true;
        break;
      }

      state = std::move(result.state);
      done = result.done;
    }

    if (metrics.steps > 0) {
      metrics.mean_reward =
          metrics.total_reward / static_cast<double>(metrics.steps);
    }
    if (loss_count > 0) {
      metrics.mean_loss = loss_sum / static_cast<double>(loss_count);
    }
    if constexpr (TracedEnvironment<E>) {
      metrics.trace = env.trace();
    }

    if (failed) break;  // truncate: the failing episode is not recorded
    agent.decay_epsilon();
    report.episodes.push_back(std::move(metrics));
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

/// Greedy rollouts: no exploration, no buffer writes, no training. The agent
/// is read-only.
template <Environment E>
EvaluationSummary evaluate_policy(E& env, const Agent& agent,
                                  std::size_t n_episodes) {
  detail::check_dimensions(env, agent);
  const std::size_t n_actions = env.action_count();

  EvaluationSummary summary;
  summary.episodes = n_episodes;
  summary.action_counts.assign(n_actions, 0);
  summary.has_traces = TracedEnvironment<E>;
  if constexpr (TracedEnvironment<E>) {
    summary.weekday_action_counts.assign(7 * n_actions, 0);
  }

  double total_reward = 0.0;
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    StateVector state = env.reset();
    bool done = false;
    while (!done) {
      int weekday = 0;
      if constexpr (TracedEnvironment<E>) weekday = env.current_weekday();

      const int action = agent.greedy_action(state);
      StepResult result = env.step(action);
      total_reward += result.reward;
      summary.action_counts[static_cast<std::size_t>(action)] += 1;
      summary.total_steps += 1;
      if constexpr (TracedEnvironment<E>) {
        summary.weekday_action_counts[static_cast<std::size_t>(weekday) *
                                          n_actions +
                                      static_cast<std::size_t>(action)] += 1;
      }
      state = std::move(result.state);
      done = result.done;
    }
    if constexpr (TracedEnvironment<E>) {
      summary.last_trace = env.trace();
    }
  }

  if (n_episodes > 0) {
    summary.mean_episode_reward =
        total_reward / static_cast<double>(n_episodes);
  }
  if (summary.total_steps > 0) {
    summary.mean_step_reward =
        total_reward / static_cast<double>(summary.total_steps);
  }
  return summary;
}

}  // namespace qretail
