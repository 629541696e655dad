#include "qretail/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qretail/config.hpp"
#include "qretail/pricing_env.hpp"
#include "qretail/report.hpp"

using namespace qretail;

namespace {

struct PricingRun {
  PricingEnv env;
  Agent agent;
  ReplayBuffer buffer;

  explicit PricingRun(std::uint64_t seed)
      : env(PricingConfig{}, seed + 1000),
        agent(2, make_agent_config(), seed, seed + 1),
        buffer(10000) {}

  static AgentConfig make_agent_config() {
    AgentConfig config;
    config.n_actions = 8;
    config.hidden_sizes = {32, 32};
    config.gamma = 0.3;
    config.epsilon_start = 1.0;
    config.epsilon_decay = 0.97;
    config.epsilon_min = 0.01;
    config.learning_rate = 1e-3;
    config.batch_size = 32;
    return config;
  }
};

bool params_equal(const NetworkParams& a, const NetworkParams& b) {
  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    if (a.weights[l].data != b.weights[l].data) return false;
    if (a.biases[l] != b.biases[l]) return false;
  }
  return a.adam_step_count == b.adam_step_count;
}

}  // namespace

TEST(RunTraining, ZeroEpisodesLeavesEverythingUntouched) {
  PricingRun run(3);
  const NetworkParams before = run.agent.online();
  const TrainingReport report =
      run_training(run.env, run.agent, run.buffer, 0);
  EXPECT_TRUE(report.episodes.empty());
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(run.buffer.size(), 0u);
  EXPECT_DOUBLE_EQ(run.agent.epsilon(), 1.0);
  EXPECT_TRUE(params_equal(run.agent.online(), before));
}

TEST(RunTraining, PaperPricingRunProducesFiftyEpisodes) {
  PricingRun run(5);
  const TrainingReport report =
      run_training(run.env, run.agent, run.buffer, 50);
  ASSERT_EQ(report.episodes.size(), 50u);
  for (std::size_t k = 0; k < 50; ++k) {
    const EpisodeMetrics& m = report.episodes[k];
    EXPECT_EQ(m.episode, k);
    EXPECT_EQ(m.steps, 7u);
    EXPECT_NEAR(m.epsilon,
                std::max(0.01, std::pow(0.97, static_cast<double>(k))), 1e-12);
    std::size_t count_sum = 0;
    for (std::size_t c : m.action_counts) count_sum += c;
    EXPECT_EQ(count_sum, m.steps);
    EXPECT_EQ(m.actions.size(), m.steps);
    EXPECT_NEAR(m.mean_reward, m.total_reward / 7.0, 1e-12);
  }
  EXPECT_FALSE(report.has_traces);
}

TEST(RunTraining, BufferGrowsSevenPerEpisode) {
  for (std::size_t episodes : {1u, 3u, 10u}) {
    PricingRun run(9);
    run_training(run.env, run.agent, run.buffer, episodes);
    EXPECT_EQ(run.buffer.size(), 7u * episodes);
  }
}

TEST(RunTraining, DeterministicGivenSeeds) {
  PricingRun a(17);
  PricingRun b(17);
  const TrainingReport ra = run_training(a.env, a.agent, a.buffer, 12);
  const TrainingReport rb = run_training(b.env, b.agent, b.buffer, 12);
  EXPECT_EQ(render_metrics_csv(ra), render_metrics_csv(rb));
  EXPECT_EQ(render_actions_timeline_csv(ra), render_actions_timeline_csv(rb));
  EXPECT_TRUE(params_equal(a.agent.online(), b.agent.online()));
}

TEST(RunTraining, DimensionMismatchFailsBeforeRunning) {
  PricingEnv env(PricingConfig{}, 1);
  AgentConfig config = PricingRun::make_agent_config();
  config.n_actions = 5;  // env has 8 actions
  Agent agent(2, config, 1, 2);
  ReplayBuffer buffer(100);
  EXPECT_THROW(run_training(env, agent, buffer, 3), config_error);
  EXPECT_EQ(buffer.size(), 0u);

  Agent wide(7, PricingRun::make_agent_config(), 1, 2);
  EXPECT_THROW(run_training(env, wide, buffer, 3), config_error);
}

TEST(RunTraining, SupplyRunRecordsTracesAndWeekdayCounts) {
  SupplyConfig env_config;
  env_config.episode_len = 20;
  env_config.lag_max = 5;
  const DemandSeries series = synth_generate(2, 60);

  AgentConfig agent_config = PricingRun::make_agent_config();
  agent_config.n_actions = 7;
  agent_config.hidden_sizes = {16, 16};
  agent_config.batch_size = 8;

  SupplyEnv env(env_config, series, 31);
  Agent agent(9, agent_config, 32, 33);
  ReplayBuffer buffer(5000);
  const TrainingReport report = run_training(env, agent, buffer, 5);

  EXPECT_TRUE(report.has_traces);
  ASSERT_EQ(report.episodes.size(), 5u);
  for (const EpisodeMetrics& m : report.episodes) {
    EXPECT_EQ(m.trace.size(), m.steps);
    std::size_t weekday_sum = 0;
    for (std::size_t c : m.weekday_action_counts) weekday_sum += c;
    EXPECT_EQ(weekday_sum, m.steps);
  }
}

TEST(EvaluatePolicy, NeverMutatesTheAgent) {
  PricingRun run(23);
  run_training(run.env, run.agent, run.buffer, 5);
  const NetworkParams online_before = run.agent.online();
  const NetworkParams target_before = run.agent.target();
  const double epsilon_before = run.agent.epsilon();
  const std::uint64_t steps_before = run.agent.gradient_steps();

  const EvaluationSummary summary =
      evaluate_policy(run.env, run.agent, 10);
  EXPECT_EQ(summary.episodes, 10u);
  EXPECT_EQ(summary.total_steps, 70u);

  EXPECT_TRUE(params_equal(run.agent.online(), online_before));
  EXPECT_TRUE(params_equal(run.agent.target(), target_before));
  EXPECT_DOUBLE_EQ(run.agent.epsilon(), epsilon_before);
  EXPECT_EQ(run.agent.gradient_steps(), steps_before);
}

TEST(EvaluatePolicy, ZeroNetworksAlwaysPickActionZero) {
  AgentConfig config = PricingRun::make_agent_config();
  NetworkParams net = init_network({2, 32, 32, 8}, 0);
  for (auto& w : net.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
  Agent agent(config, net, net, 0.0, 0, 0, 0);
  PricingEnv env(PricingConfig{}, 2);

  const EvaluationSummary summary = evaluate_policy(env, agent, 4);
  EXPECT_EQ(summary.action_counts[0], 28u);
  for (std::size_t a = 1; a < 8; ++a) EXPECT_EQ(summary.action_counts[a], 0u);
}

TEST(EvaluatePolicy, MeanRewardsAreConsistent) {
  PricingRun run(29);
  const EvaluationSummary summary = evaluate_policy(run.env, run.agent, 6);
  EXPECT_NEAR(summary.mean_episode_reward,
              summary.mean_step_reward * 7.0, 1e-12);
}
