#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "sentitrade/data_ingest.hpp"
#include "sentitrade/environment.hpp"

namespace sentitrade {

/// The six daily state variables, in network input order.
struct EnvState {
  double close_norm = 0.0;  // normalized close of day t
  double sent_today = 0.0;  // sentiment of day t
  double growth5 = 0.0;     // growth bias vs. the 5 previous closes
  double sent5 = 0.0;       // mean sentiment of days t-5..t-1
  double growth30 = 0.0;    // growth bias vs. the 30 previous closes
  double sent30 = 0.0;      // mean sentiment of days t-30..t-1

  StateVector features() const { return {close_norm, sent_today, growth5, sent5, growth30, sent30}; }
  static EnvState from_features(const StateVector& f) { return {f[0], f[1], f[2], f[3], f[4], f[5]}; }

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

/// Reward blend weights. Daily sentiment counts twice the 5-day term and
/// four times the 30-day term.
struct RewardWeights {
  double w_daily = 4.0;
  double w_5 = 2.0;
  double w_30 = 1.0;
  double alpha_price = 1.0;  // weight of the realized next-day normalized move
};

struct EnvConfig {
  RewardWeights weights;
  std::size_t warmup_days = 30;
  /// When false, sentiment is zeroed in both the state and the reward.
  bool use_sentiment = true;

  void validate() const;
};

/// Aligned per-day market data for one episode window (warmup included).
struct MarketWindow {
  std::vector<Date> dates;
  std::vector<double> closes;      // raw prices, > 0
  std::vector<double> close_norm;  // scaled closes
  std::vector<double> sentiment;   // daily signal, 0 when missing

  std::size_t size() const { return dates.size(); }
};

/// Bars dated within [from, to] plus up to `history` earlier bars for warmup.
/// Days without a signal get sentiment 0.
MarketWindow build_window(std::span<const MarketBar> bars, const PriceScaler& scaler,
                          const std::map<Date, double>& sentiment, Date from, Date to,
                          std::size_t history);

/// (close_t - mean(previous `window` closes)) / that mean. `closes` ends at
/// day t. Throws std::invalid_argument without enough history and
/// std::domain_error for a zero mean.
double growth_bias(std::span<const double> closes, std::size_t window);

/// g scaled by the day's normalized close.
double growth_signal(double g, double close_norm_t);

/// Six-variable state of day t. Requires t >= 30.
EnvState make_state(const MarketWindow& market, std::size_t t);

/// Sentiment + growth blend of day t (direction-free part of the reward).
double reward_blend(const MarketWindow& market, std::size_t t, const RewardWeights& weights);

/// direction(action) * (alpha_price * (close_norm[t+1] - close_norm[t]) + blend).
/// Hold is exactly 0. Requires 30 <= t and t + 1 < size.
double reward(const MarketWindow& market, std::size_t t, Action action, const RewardWeights& weights);

/// Single-cursor MDP over one window. Days [0, warmup) are history only;
/// the agent acts on days warmup .. size-2 and the episode ends when the
/// cursor reaches the final day, so an episode has size - warmup - 1 steps.
class MarketEnv final : public Environment {
 public:
  /// Throws std::invalid_argument if the window is shorter than warmup + 2.
  MarketEnv(MarketWindow window, EnvConfig config);

  StateVector reset() override;
  Step step(Action action) override;
  std::size_t episode_length() const override { return window_.size() - config_.warmup_days - 1; }

  EnvState current_state() const { return make_state(window_, cursor_); }
  std::size_t cursor() const { return cursor_; }
  bool done() const { return cursor_ + 1 >= window_.size(); }
  const MarketWindow& window() const { return window_; }
  const EnvConfig& config() const { return config_; }

 private:
  MarketWindow window_;
  EnvConfig config_;
  std::size_t cursor_ = 0;
  bool started_ = false;
};

}  // namespace sentitrade
