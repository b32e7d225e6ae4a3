#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sentitrade/market_env.hpp"
#include "test_support.hpp"

using namespace sentitrade;

namespace {

MarketWindow window_of(const std::vector<double>& closes, const std::vector<double>& sentiment) {
  MarketWindow w;
  const auto scaler = PriceScaler::fit(closes);
  Date d{2020, 1, 1};
  for (std::size_t i = 0; i < closes.size(); ++i, d = d.plus_days(1)) {
    w.dates.push_back(d);
    w.closes.push_back(closes[i]);
    w.close_norm.push_back(scaler.apply(closes[i]));
    w.sentiment.push_back(sentiment.empty() ? 0.0 : sentiment[i]);
  }
  return w;
}

MarketWindow random_window(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> closes(n), sent(n);
  double c = 50;
  for (std::size_t i = 0; i < n; ++i) {
    c *= 1 + support::uniform(rng, -0.03, 0.03);
    closes[i] = c;
    sent[i] = support::uniform(rng, -2, 2);
  }
  return window_of(closes, sent);
}

// Spreadsheet-style oracle: every quantity recomputed from raw vectors.
double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return std::accumulate(v.begin() + static_cast<long>(from), v.begin() + static_cast<long>(to), 0.0) /
         static_cast<double>(to - from);
}

std::array<double, 6> oracle_state(const MarketWindow& w, std::size_t t) {
  const auto m5 = mean_of(w.closes, t - 5, t), m30 = mean_of(w.closes, t - 30, t);
  return {w.close_norm[t], w.sentiment[t], (w.closes[t] - m5) / m5, mean_of(w.sentiment, t - 5, t),
          (w.closes[t] - m30) / m30, mean_of(w.sentiment, t - 30, t)};
}

double oracle_reward(const MarketWindow& w, std::size_t t, int dir) {
  const auto s = oracle_state(w, t);
  const double g1 = (w.closes[t] - w.closes[t - 1]) / w.closes[t - 1];
  const double cn = w.close_norm[t];
  const double blend = 4 * (s[1] + g1 * cn) + 2 * (s[3] + s[2] * cn) + 1 * (s[5] + s[4] * cn);
  return dir * ((w.close_norm[t + 1] - w.close_norm[t]) + blend);
}

}  // namespace

TEST(GrowthBias, Examples) {
  EXPECT_DOUBLE_EQ(growth_bias(std::vector<double>{10, 10, 10, 10, 10, 11}, 5), 0.1);
  EXPECT_EQ(growth_bias(std::vector<double>(31, 7.0), 30), 0.0);
  EXPECT_DOUBLE_EQ(growth_bias(std::vector<double>{18, 22, 20, 19, 21, 15}, 5), -0.25);
  EXPECT_THROW(growth_bias(std::vector<double>{1, 2, 3}, 5), std::invalid_argument);
  EXPECT_THROW(growth_bias(std::vector<double>{0, 0, 1}, 2), std::domain_error);
}

TEST(GrowthBias, ScaleInvariant) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> closes(31);
    for (auto& c : closes) c = support::uniform(rng, 1, 200);
    const double k = std::exp2(static_cast<double>(rng() % 20) - 10);  // exact power of two
    std::vector<double> scaled(closes);
    for (auto& c : scaled) c *= k;
    EXPECT_EQ(growth_bias(closes, 5), growth_bias(scaled, 5));
    EXPECT_EQ(growth_bias(closes, 30), growth_bias(scaled, 30));
    const double c = support::uniform(rng, 0.01, 100);
    for (auto& v : scaled) v = v / k * c;
    EXPECT_NEAR(growth_bias(closes, 30), growth_bias(scaled, 30), 1e-12);
  }
}

TEST(GrowthSignal, Examples) {
  EXPECT_DOUBLE_EQ(growth_signal(0.1, 50), 5.0);
  EXPECT_EQ(growth_signal(0, 73), 0.0);
  EXPECT_DOUBLE_EQ(growth_signal(-0.2, 10), -2.0);
}

TEST(State, ZeroSentimentAndFlatPrices) {
  const auto w = window_of(std::vector<double>(40, 5.0), {});
  const auto s = make_state(w, 30);
  EXPECT_EQ(s, (EnvState{50, 0, 0, 0, 0, 0}));
  EXPECT_THROW(make_state(w, 29), std::invalid_argument);
}

TEST(State, HandBuilt31DaySeries) {
  // closes 1..31, sentiment i/10 on day i.
  std::vector<double> closes(31), sent(31);
  for (int i = 0; i < 31; ++i) {
    closes[i] = i + 1;
    sent[i] = i / 10.0;
  }
  const auto s = make_state(window_of(closes, sent), 30);
  EXPECT_DOUBLE_EQ(s.close_norm, 100.0);
  EXPECT_DOUBLE_EQ(s.sent_today, 3.0);
  EXPECT_DOUBLE_EQ(s.growth5, (31.0 - 28.0) / 28.0);  // prior closes 26..30
  EXPECT_DOUBLE_EQ(s.sent5, 2.7);                      // days 25..29
  EXPECT_DOUBLE_EQ(s.growth30, (31.0 - 15.5) / 15.5);  // prior closes 1..30
  EXPECT_DOUBLE_EQ(s.sent30, 1.45);                    // days 0..29
}

TEST(State, MatchesOracleOnRandomWindows) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_window(rng, 80);
    for (std::size_t t = 30; t < w.size(); ++t) {
      const auto got = make_state(w, t).features();
      const auto want = oracle_state(w, t);
      for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(got[k], want[k], 1e-12 * (1 + std::abs(want[k])));
    }
  }
}

TEST(Reward, Examples) {
  std::vector<double> closes(40, 10.0);
  closes.back() = 10.0;
  auto w = window_of(closes, {});
  w.close_norm.assign(40, 20.0);
  w.close_norm[31] = 23.0;  // +3 move from day 30, blend 0 (flat raw closes, zero sentiment)
  const RewardWeights weights;
  EXPECT_EQ(reward(w, 30, Action::Buy, weights), 3.0);
  EXPECT_EQ(reward(w, 30, Action::Sell, weights), -3.0);
  EXPECT_EQ(reward(w, 30, Action::Hold, weights), 0.0);
  const auto flat = window_of(std::vector<double>(40, 5.0), {});
  for (std::size_t t = 30; t + 1 < flat.size(); ++t) {
    for (auto a : {Action::Buy, Action::Sell, Action::Hold}) EXPECT_EQ(reward(flat, t, a, weights), 0.0);
  }
  EXPECT_THROW(reward(flat, 39, Action::Buy, weights), std::out_of_range);
}

TEST(Reward, MatchesOracleAndIsAntisymmetric) {
  std::mt19937_64 rng(59);
  const RewardWeights weights;
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = random_window(rng, 120);
    for (std::size_t t = 30; t + 1 < w.size(); ++t) {
      const double buy = reward(w, t, Action::Buy, weights);
      EXPECT_NEAR(buy, oracle_reward(w, t, 1), 1e-9 * (1 + std::abs(buy)));
      EXPECT_EQ(buy, -reward(w, t, Action::Sell, weights));
      EXPECT_EQ(reward(w, t, Action::Hold, weights), 0.0);
    }
  }
}

TEST(Reward, AlphaZeroIsPureSignal) {
  std::mt19937_64 rng(61);
  const auto w = random_window(rng, 60);
  RewardWeights weights;
  weights.alpha_price = 0;
  EXPECT_DOUBLE_EQ(reward(w, 40, Action::Buy, weights), reward_blend(w, 40, weights));
}

TEST(Env, EpisodeLengthAndReplay) {
  std::mt19937_64 rng(67);
  const auto w = random_window(rng, 45);
  MarketEnv env(w, EnvConfig{});
  EXPECT_EQ(env.episode_length(), 45u - 30u - 1u);
  EXPECT_THROW(env.step(Action::Buy), std::logic_error);

  std::vector<Action> actions;
  for (int i = 0; i < 14; ++i) actions.push_back(action_at(rng() % 3));
  auto run = [&] {
    std::vector<double> rewards;
    auto s = env.reset();
    EXPECT_EQ(s, make_state(w, 30).features());
    std::size_t steps = 0;
    for (;;) {
      const auto t = env.cursor();
      const auto step = env.step(actions[steps]);
      EXPECT_EQ(step.reward, reward(w, t, actions[steps], RewardWeights{}));
      EXPECT_EQ(step.next_state, make_state(w, t + 1).features());
      rewards.push_back(step.reward);
      ++steps;
      if (step.done) break;
    }
    EXPECT_EQ(steps, env.episode_length());
    return rewards;
  };
  EXPECT_EQ(run(), run());
  EXPECT_THROW(env.step(Action::Hold), std::logic_error);
}

TEST(Env, NonCommunityAwareZeroesSentimentEverywhere) {
  std::mt19937_64 rng(71);
  const auto w = random_window(rng, 50);
  EnvConfig cfg;
  cfg.use_sentiment = false;
  MarketEnv env(w, cfg);
  auto zeroed = w;
  std::fill(zeroed.sentiment.begin(), zeroed.sentiment.end(), 0.0);
  auto s = env.reset();
  EXPECT_EQ(s[1], 0.0);
  EXPECT_EQ(s[3], 0.0);
  EXPECT_EQ(s[5], 0.0);
  const auto step = env.step(Action::Buy);
  EXPECT_EQ(step.reward, reward(zeroed, 30, Action::Buy, RewardWeights{}));
}

TEST(Env, Validation) {
  EnvConfig cfg;
  cfg.warmup_days = 29;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  const auto short_window = window_of(std::vector<double>(31, 1.0), {});
  EXPECT_THROW(MarketEnv(short_window, EnvConfig{}), std::invalid_argument);
  EXPECT_NO_THROW(MarketEnv(window_of(std::vector<double>(32, 1.0), {}), EnvConfig{}));
}

TEST(Window, BuildWithHistoryAndMissingSignals) {
  std::vector<MarketBar> bars;
  Date d{2020, 1, 1};
  for (int i = 0; i < 10; ++i, d = d.plus_days(1)) bars.push_back({d, 1, 2, 1, 1.0 + i, 0});
  const auto scaler = PriceScaler::fit(std::vector<double>{1, 5});
  const std::map<Date, double> sent = {{Date(2020, 1, 8), 0.5}};
  const auto w = build_window(bars, scaler, sent, Date(2020, 1, 7), Date(2020, 1, 9), 2);
  ASSERT_EQ(w.size(), 5u);
  EXPECT_EQ(w.dates.front(), Date(2020, 1, 5));
  EXPECT_EQ(w.closes.front(), 5.0);
  EXPECT_EQ(w.close_norm.back(), 200.0);  // test-window values may leave [0, 100]
  EXPECT_EQ(w.sentiment, (std::vector<double>{0, 0, 0, 0.5, 0}));
}

TEST(Actions, Mapping) {
  EXPECT_EQ(direction(Action::Buy), 1);
  EXPECT_EQ(direction(Action::Sell), -1);
  EXPECT_EQ(direction(Action::Hold), 0);
  EXPECT_EQ(index_of(Action::Hold), 2u);
  EXPECT_EQ(parse_action("buy"), Action::Buy);
  EXPECT_EQ(to_string(Action::Sell), "sell");
}
