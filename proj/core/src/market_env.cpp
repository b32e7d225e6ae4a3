#include "sentitrade/market_env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "sentitrade/io_util.hpp"

namespace sentitrade {

namespace {

constexpr std::size_t kShortWindow = 5;
constexpr std::size_t kLongWindow = 30;

double mean_of(std::span<const double> v, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += v[i];
  return s / static_cast<double>(to - from);
}

void require_history(const MarketWindow& m, std::size_t t) {
  if (t < kLongWindow) {
    throw std::invalid_argument("day " + std::to_string(t) + " has fewer than " +
                                std::to_string(kLongWindow) + " days of history");
  }
  if (t >= m.size()) throw std::out_of_range("day index past the end of the window");
}

}  // namespace

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Buy: return "buy";
    case Action::Sell: return "sell";
    case Action::Hold: return "hold";
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view name) {
  const auto n = to_lower_ascii(trim(name));
  if (n == "buy") return Action::Buy;
  if (n == "sell") return Action::Sell;
  if (n == "hold") return Action::Hold;
  return std::nullopt;
}

void EnvConfig::validate() const {
  if (warmup_days < kLongWindow) {
    throw std::invalid_argument("warmup_days must be >= " + std::to_string(kLongWindow));
  }
  const std::pair<const char*, double> named[] = {{"w_daily", weights.w_daily},
                                                  {"w_5", weights.w_5},
                                                  {"w_30", weights.w_30},
                                                  {"alpha_price", weights.alpha_price}};
  for (const auto& [name, w] : named) {
    if (!std::isfinite(w)) throw std::invalid_argument(std::string{name} + " must be finite");
  }
}

MarketWindow build_window(std::span<const MarketBar> bars, const PriceScaler& scaler,
                          const std::map<Date, double>& sentiment, Date from, Date to,
                          std::size_t history) {
  std::size_t first = 0;
  while (first < bars.size() && bars[first].date < from) ++first;
  std::size_t last = first;
  while (last < bars.size() && bars[last].date <= to) ++last;
  const std::size_t start = first >= history ? first - history : 0;

  MarketWindow w;
  for (std::size_t i = start; i < last; ++i) {
    w.dates.push_back(bars[i].date);
    w.closes.push_back(bars[i].close);
    w.close_norm.push_back(scaler.apply(bars[i].close));
    auto it = sentiment.find(bars[i].date);
    w.sentiment.push_back(it == sentiment.end() ? 0.0 : it->second);
  }
  return w;
}

double growth_bias(std::span<const double> closes, std::size_t window) {
  if (window == 0) throw std::invalid_argument("growth window must be positive");
  if (closes.size() < window + 1) {
    throw std::invalid_argument("growth_bias needs " + std::to_string(window) +
                                " prior closes, have " + std::to_string(closes.size() - 1));
  }
  const std::size_t t = closes.size() - 1;
  const double mean = mean_of(closes, t - window, t);
  if (mean == 0.0) throw std::domain_error("growth_bias: trailing mean is zero");
  return (closes[t] - mean) / mean;
}

double growth_signal(double g, double close_norm_t) { return g * close_norm_t; }

EnvState make_state(const MarketWindow& market, std::size_t t) {
  require_history(market, t);
  const std::span<const double> closes(market.closes.data(), t + 1);
  EnvState s;
  s.close_norm = market.close_norm[t];
  s.sent_today = market.sentiment[t];
  s.growth5 = growth_bias(closes, kShortWindow);
  s.sent5 = mean_of(market.sentiment, t - kShortWindow, t);
  s.growth30 = growth_bias(closes, kLongWindow);
  s.sent30 = mean_of(market.sentiment, t - kLongWindow, t);
  return s;
}

double reward_blend(const MarketWindow& market, std::size_t t, const RewardWeights& weights) {
  const auto s = make_state(market, t);
  const std::span<const double> closes(market.closes.data(), t + 1);
  const double g1 = growth_bias(closes, 1);
  return weights.w_daily * (s.sent_today + growth_signal(g1, s.close_norm)) +
         weights.w_5 * (s.sent5 + growth_signal(s.growth5, s.close_norm)) +
         weights.w_30 * (s.sent30 + growth_signal(s.growth30, s.close_norm));
}

double reward(const MarketWindow& market, std::size_t t, Action action, const RewardWeights& weights) {
  require_history(market, t);
  if (t + 1 >= market.size()) throw std::out_of_range("reward needs the next day's close");
  const int dir = direction(action);
  if (dir == 0) return 0.0;
  const double move = market.close_norm[t + 1] - market.close_norm[t];
  return dir * (weights.alpha_price * move + reward_blend(market, t, weights));
}

MarketEnv::MarketEnv(MarketWindow window, EnvConfig config)
    : window_(std::move(window)), config_(config) {
  config_.validate();
  const auto n = window_.size();
  if (window_.closes.size() != n || window_.close_norm.size() != n || window_.sentiment.size() != n) {
    throw std::invalid_argument("market window columns have different lengths");
  }
  if (n < config_.warmup_days + 2) {
    throw std::invalid_argument("market window has " + std::to_string(n) + " days; needs at least " +
                                std::to_string(config_.warmup_days + 2) + " (warmup + 2)");
  }
  if (!config_.use_sentiment) window_.sentiment.assign(n, 0.0);
  cursor_ = config_.warmup_days;
}

StateVector MarketEnv::reset() {
  cursor_ = config_.warmup_days;
  started_ = true;
  return current_state().features();
}

Step MarketEnv::step(Action action) {
  if (!started_) throw std::logic_error("MarketEnv::step before reset");
  if (done()) throw std::logic_error("MarketEnv::step after the episode is done");
  Step out;
  out.reward = reward(window_, cursor_, action, config_.weights);
  ++cursor_;
  out.next_state = current_state().features();
  out.done = done();
  return out;
}

}  // namespace sentitrade
