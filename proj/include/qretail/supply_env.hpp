#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qretail/common.hpp"
#include "qretail/demand.hpp"

namespace qretail {

struct SupplyConfig {
  // Packs per day the agent may order.
  std::vector<int> actions = {0, 2, 4, 6, 8, 10, 12};
  double pack_unit = 0.05;
  double price_profit = 1.0;
  double price_support = 0.5;
  std::size_t episode_len = 150;
  std::size_t lag_max = 25;
  // Episodes truncate as soon as a step reward falls below this; keep it
  // strictly negative so zero-action steps never truncate.
  double stop_reward = -0.25;
  bool include_stock_feature = false;

  void validate() const {
    if (actions.empty()) throw config_error("supply: actions list is empty");
    for (int a : actions) {
      if (a < 0) throw config_error("supply: pack counts must be non-negative");
    }
    if (!(pack_unit > 0.0)) throw config_error("supply: pack_unit must be positive");
    if (episode_len < 1) throw config_error("supply: episode_len must be >= 1");
    if (!std::isfinite(price_profit) || !std::isfinite(price_support) ||
        !std::isfinite(stop_reward)) {
      throw config_error("supply: prices and stop_reward must be finite");
    }
  }
};

/// Per-day series of one episode, kept for reporting.
struct EpisodeTrace {
  std::vector<double> demand;
  std::vector<double> supply;
  std::vector<double> sales;
  std::vector<double> stock;
  std::vector<double> shortage;

  std::size_t size() const { return demand.size(); }
};

/// Pack-quantized supply against a demand window with stock carry-over.
/// State: [promo, previous day sales, 7 weekday one-hot bits, (stock)].
/// Reward per step: price_profit * sales - price_support * supplied volume.
class SupplyEnv {
 public:
  SupplyEnv(SupplyConfig config, DemandSeries series, std::uint64_t seed)
      : config_(std::move(config)),
        series_(std::move(series)),
        rng_(static_cast<std::mt19937::result_type>(seed)) {
    config_.validate();
    if (series_.size() < config_.lag_max + config_.episode_len) {
      throw config_error("supply: demand series has " +
                         std::to_string(series_.size()) + " days, needs >= " +
                         std::to_string(config_.lag_max + config_.episode_len));
    }
  }

  /// Draws the episode's random lag and rebuilds the day-zero state. The
  /// pre-episode "previous day sales" falls back to the series demand just
  /// before the window (0 when the window starts at day 0).
  StateVector reset() {
    std::uniform_int_distribution<std::size_t> lag_dist(0, config_.lag_max);
    lag_ = lag_dist(rng_);
    t_ = 0;
    stock_ = 0.0;
    prev_sales_ = lag_ > 0 ? series_.days[lag_ - 1].demand : 0.0;
    done_ = false;
    trace_ = EpisodeTrace{};
    return observe(lag_);
  }

  StepResult step(int action) {
    if (done_) throw contract_error("supply step: episode is finished");
    if (action < 0 || static_cast<std::size_t>(action) >= config_.actions.size()) {
      throw contract_error("supply step: action index out of range");
    }
    const std::size_t day = lag_ + t_;
    const double demand = series_.days[day].demand;
    const double supplied =
        config_.actions[static_cast<std::size_t>(action)] * config_.pack_unit;
    const double available = stock_ + supplied;
    const double sales = std::min(demand, available);
    const double shortage = demand - sales;
    stock_ = available - sales;
    const double reward =
        config_.price_profit * sales - config_.price_support * supplied;

    trace_.demand.push_back(demand);
    trace_.supply.push_back(supplied);
    trace_.sales.push_back(sales);
    trace_.stock.push_back(stock_);
    trace_.shortage.push_back(shortage);

    ++t_;
    prev_sales_ = sales;
    done_ = t_ == config_.episode_len || reward < config_.stop_reward;

    const std::size_t next_day = std::min(lag_ + t_, series_.size() - 1);
    return StepResult{observe(next_day), reward, done_};
  }

  std::size_t state_dim() const { return config_.include_stock_feature ? 10 : 9; }
  std::size_t action_count() const { return config_.actions.size(); }
  const SupplyConfig& config() const { return config_; }
  const EpisodeTrace& trace() const { return trace_; }
  const DemandSeries& series() const { return series_; }
  std::size_t lag() const { return lag_; }
  double stock() const { return stock_; }

  /// Weekday (0=Monday) of the day the next step will serve.
  int current_weekday() const {
    const std::size_t day = std::min(lag_ + t_, series_.size() - 1);
    return series_.days[day].weekday;
  }

 private:
  StateVector observe(std::size_t day) const {
    StateVector state;
    state.reserve(state_dim());
    state.push_back(series_.days[day].promo ? 1.0 : 0.0);
    state.push_back(prev_sales_);
    for (int wd = 0; wd < 7; ++wd) {
      state.push_back(series_.days[day].weekday == wd ? 1.0 : 0.0);
    }
    if (config_.include_stock_feature) state.push_back(stock_);
    return state;
  }

  SupplyConfig config_;
  DemandSeries series_;
  std::mt19937 rng_;
  EpisodeTrace trace_;
  std::size_t lag_ = 0;
  std::size_t t_ = 0;
  double stock_ = 0.0;
  double prev_sales_ = 0.0;
  bool done_ = true;
};

}  // namespace qretail
