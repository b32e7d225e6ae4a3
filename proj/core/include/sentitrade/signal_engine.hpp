#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sentitrade/data_ingest.hpp"
#include "sentitrade/knowledge_graph.hpp"
#include "sentitrade/sentiment.hpp"
#include "sentitrade/social_graph.hpp"

namespace sentitrade {

enum class RetweetBiasMode { Additive, Multiplicative };

std::optional<RetweetBiasMode> parse_retweet_bias_mode(std::string_view name);
std::string_view to_string(RetweetBiasMode mode);

struct SignalConfig {
  double rc_oe = 2.0;  // retweet coefficient
  double rp = 4.0;     // reduction for related-keyword tweets
  RetweetBiasMode retweet_bias_mode = RetweetBiasMode::Additive;
  /// Offset applied to created_at before taking its calendar day.
  int utc_offset_minutes = 0;

  /// Throws std::invalid_argument naming the bad key.
  void validate() const;
};

/// RB = rc_oe + rc (additive, as printed) or rc_oe * rc (multiplicative).
double retweet_bias(double rc_oe, std::int64_t rc,
                    RetweetBiasMode mode = RetweetBiasMode::Additive);

/// IB = RB + LC + RepC
double interaction_bias(double rb, std::int64_t lc, std::int64_t rep_c);

/// Main: ES = IB + IS. Related: ES = (IB + IS) / rp.
/// Throws std::invalid_argument for MatchKind::None.
double effect_score(double ib, double is, MatchKind match, double rp = 4.0);

/// ES scaled by the polarity's numeric value.
double signed_score(double es, Polarity polarity);

/// Divides by the Euclidean norm; a zero vector comes back unchanged.
/// Throws std::invalid_argument on empty input.
std::vector<double> normalize_day(std::span<const double> scores);

/// Sum of the day's L2-normalized signed scores; 0 for an empty day.
DailySignal daily_sentiment(std::string ticker, Date date, std::span<const double> signed_scores);

/// Index of the first trading day on or after `day`; nullopt before the first
/// or after the last trading day.
std::optional<std::size_t> assign_trading_day(std::span<const Date> trading_days, Date day);

struct SignalStats {
  std::size_t main_matches = 0;
  std::size_t related_matches = 0;
  std::size_t unmatched = 0;
  std::size_t unscored = 0;
  std::size_t outside_calendar = 0;  // matched tweets outside the price calendar
};

struct SignalBuild {
  std::vector<DailySignal> signals;  // one row per trading day, in date order
  SignalStats stats;
};

/// Full per-ticker pipeline: match, score only the matched tweets, weight by
/// effect score, bucket to trading days (non-trading days roll forward) and
/// aggregate. Deterministic for deterministic providers.
SignalBuild build_daily_signals(const std::string& ticker, std::span<const Date> trading_days,
                                std::span<const TweetRecord> tweets, const KeywordDictionary& dict,
                                const InfluencerMap& influencers, const SentimentProvider& provider,
                                const SignalConfig& config, int max_in_flight = 1);

}  // namespace sentitrade
