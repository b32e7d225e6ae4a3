#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sentitrade/date.hpp"
#include "sentitrade/io_util.hpp"

namespace sentitrade {

/// One daily OHLCV row. low <= min(open, close), high >= max(open, close).
struct MarketBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::int64_t volume = 0;

  friend bool operator==(const MarketBar&, const MarketBar&) = default;
};

struct TweetRecord {
  std::string id;
  std::string author_id;
  Timestamp created_at{};
  std::string text;
  std::int64_t retweet_count = 0;
  std::int64_t like_count = 0;
  std::int64_t reply_count = 0;
};

struct FollowEdge {
  std::string follower;
  std::string followee;

  friend auto operator<=>(const FollowEdge&, const FollowEdge&) = default;
};

/// Per-ticker, per-trading-day aggregated community sentiment.
struct DailySignal {
  std::string ticker;
  Date date;
  double sentiment_value = 0.0;

  friend bool operator==(const DailySignal&, const DailySignal&) = default;
};

/// Min-max map onto [0, 100]. Fitted on one window and reusable on another,
/// in which case values outside [0, 100] are possible.
class PriceScaler {
 public:
  /// Throws std::invalid_argument unless lo <= hi.
  PriceScaler(double lo, double hi);
  /// Throws std::invalid_argument on empty input.
  static PriceScaler fit(std::span<const double> values);

  double apply(double x) const;
  std::vector<double> apply(std::span<const double> xs) const;

  double min() const { return min_; }
  double max() const { return max_; }
  bool degenerate() const { return max_ == min_; }

 private:
  double min_;
  double max_;
};

struct NormalizedSeries {
  std::vector<Date> dates;
  std::vector<double> values;
};

/// Parses a `date,open,high,low,close,volume` CSV (extra columns ignored,
/// header names case-insensitive) and returns bars sorted by date.
/// Throws InputError naming the line for malformed rows, duplicate dates,
/// or OHLC violations.
std::vector<MarketBar> load_market_csv(const std::filesystem::path& path);

struct TweetLoadResult {
  std::vector<TweetRecord> records;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// Streams a JSONL tweet file in order. Lines failing the schema (missing or
/// mistyped field, negative count, bad timestamp, duplicate id) are skipped
/// and reported through `on_warning`. Throws InputError only when the file
/// cannot be read.
std::size_t for_each_tweet(const std::filesystem::path& path,
                           const std::function<void(TweetRecord&&)>& on_record,
                           const std::function<void(std::string)>& on_warning);

TweetLoadResult load_tweets_jsonl(const std::filesystem::path& path);

/// `follower,followee` CSV. Structural problems only; graph rules are
/// enforced by CommunityGraph.
std::vector<FollowEdge> load_follow_edges(const std::filesystem::path& path);

/// v = 100 (x - min) / (max - min); a constant series maps to 50 everywhere.
NormalizedSeries normalize_prices(std::span<const MarketBar> bars);
std::vector<double> normalize_prices(std::span<const double> closes);

/// Writes `ticker,date,sentiment_value`. Rejects input not sorted strictly by
/// (ticker, date) with std::invalid_argument.
void store_daily_signals(const std::filesystem::path& path, std::span<const DailySignal> signals);
std::vector<DailySignal> load_daily_signals(const std::filesystem::path& path);

}  // namespace sentitrade
