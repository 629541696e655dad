#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qretail/common.hpp"

namespace qretail {

/// Extra-price optimization environment: logistic sales response, reward
/// demand * F_sales * extra_price, fresh uniform demand each step.
struct PricingConfig {
  double price_m = 1.0;
  double a = 1.0;
  double b = 1.0;
  double c = 7.0;
  double d = 1.7;
  // Extra prices as relative parts of the marginal price.
  std::vector<double> actions = {0.0, 0.15, 0.25, 0.5, 0.75, 0.85, 1.0, 1.5};
  std::size_t episode_len = 7;
  double demand_low = 0.0;
  double demand_high = 1.0;

  void validate() const {
    if (actions.empty()) throw config_error("pricing: actions list is empty");
    for (std::size_t i = 1; i < actions.size(); ++i) {
      if (!(actions[i] > actions[i - 1])) {
        throw config_error("pricing: actions must be strictly increasing");
      }
    }
    if (episode_len < 1) throw config_error("pricing: episode_len must be >= 1");
    if (!(a > 0.0)) throw config_error("pricing: parameter a must be positive");
    if (!(b > 0.0)) throw config_error("pricing: parameter b must be positive");
    if (!(demand_low < demand_high)) {
      throw config_error("pricing: demand_low must be below demand_high");
    }
    if (!std::isfinite(price_m) || !std::isfinite(c) || !std::isfinite(d)) {
      throw config_error("pricing: parameters must be finite");
    }
  }
};

/// Sales response to an extra price:
///   F = a / (1 + b * exp(c * (price_m * (1 + extra_price) - d)))
/// exp overflow saturates the value toward 0 or a.
inline double f_sales(const PricingConfig& config, double extra_price) {
  const double exponent =
      config.c * (config.price_m * (1.0 + extra_price) - config.d);
  return config.a / (1.0 + config.b * std::exp(exponent));
}

/// Step reward: demand * F_sales * extra_price.
inline double pricing_reward(const PricingConfig& config, double demand,
                             double extra_price) {
  return demand * f_sales(config, extra_price) * extra_price;
}

struct PricingOracle {
  int action = 0;
  double value = 0.0;
  // Expected profit factor F(p) * p per action, demand factored out.
  std::vector<double> table;
};

/// Brute-force ground truth: demand multiplies every action equally, so the
/// expected-reward argmax is the argmax of F(p) * p over the action list.
inline PricingOracle oracle_optimal_action(const PricingConfig& config) {
  config.validate();
  PricingOracle oracle;
  oracle.table.reserve(config.actions.size());
  for (std::size_t i = 0; i < config.actions.size(); ++i) {
    const double p = config.actions[i];
    const double value = f_sales(config, p) * p;
    oracle.table.push_back(value);
    if (i == 0 || value > oracle.value) {
      oracle.action = static_cast<int>(i);
      oracle.value = value;
    }
  }
  return oracle;
}

/// State is [today's demand, t / episode_len].
class PricingEnv {
 public:
  PricingEnv(PricingConfig config, std::uint64_t seed)
      : config_(std::move(config)),
        rng_(static_cast<std::mt19937::result_type>(seed)) {
    config_.validate();
  }

  StateVector reset() {
    t_ = 0;
    done_ = false;
    demand_ = draw_demand();
    return observe();
  }

  StepResult step(int action) {
    if (done_) throw contract_error("pricing step: episode is finished");
    if (action < 0 || static_cast<std::size_t>(action) >= config_.actions.size()) {
      throw contract_error("pricing step: action index out of range");
    }
    const double reward =
        pricing_reward(config_, demand_, config_.actions[static_cast<std::size_t>(action)]);
    ++t_;
    done_ = t_ == config_.episode_len;
    demand_ = draw_demand();
    return StepResult{observe(), reward, done_};
  }

  std::size_t state_dim() const { return 2; }
  std::size_t action_count() const { return config_.actions.size(); }
  const PricingConfig& config() const { return config_; }

 private:
  double draw_demand() {
    std::uniform_real_distribution<double> dist(config_.demand_low,
                                                config_.demand_high);
    return dist(rng_);
  }

  StateVector observe() const {
    return {demand_,
            static_cast<double>(t_) / static_cast<double>(config_.episode_len)};
  }

  PricingConfig config_;
  std::mt19937 rng_;
  double demand_ = 0.0;
  std::size_t t_ = 0;
  bool done_ = true;
};

}  // namespace qretail
