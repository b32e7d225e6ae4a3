#include "sentitrade/signal_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sentitrade/text.hpp"

namespace sentitrade {

std::optional<RetweetBiasMode> parse_retweet_bias_mode(std::string_view name) {
  const auto n = to_lower_ascii(trim(name));
  if (n == "additive") return RetweetBiasMode::Additive;
  if (n == "multiplicative") return RetweetBiasMode::Multiplicative;
  return std::nullopt;
}

std::string_view to_string(RetweetBiasMode mode) {
  return mode == RetweetBiasMode::Additive ? "additive" : "multiplicative";
}

void SignalConfig::validate() const {
  if (!(rc_oe >= 0.0) || !std::isfinite(rc_oe)) throw std::invalid_argument("rc_oe must be >= 0");
  if (!(rp > 0.0) || !std::isfinite(rp)) throw std::invalid_argument("rp must be > 0");
  if (std::abs(utc_offset_minutes) > 24 * 60) {
    throw std::invalid_argument("utc_offset_minutes must be within +-1440");
  }
}

double retweet_bias(double rc_oe, std::int64_t rc, RetweetBiasMode mode) {
  const auto count = static_cast<double>(rc);
  return mode == RetweetBiasMode::Additive ? rc_oe + count : rc_oe * count;
}

double interaction_bias(double rb, std::int64_t lc, std::int64_t rep_c) {
  return rb + static_cast<double>(lc) + static_cast<double>(rep_c);
}

double effect_score(double ib, double is, MatchKind match, double rp) {
  const double es = ib + is;
  switch (match) {
    case MatchKind::Main: return es;
    case MatchKind::Related: return es / rp;
    case MatchKind::None: break;
  }
  throw std::invalid_argument("effect_score called for a tweet that matched no keyword");
}

double signed_score(double es, Polarity polarity) { return es * numeric_value(polarity); }

std::vector<double> normalize_day(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("normalize_day needs at least one score");
  double sq = 0.0;
  for (double s : scores) sq += s * s;
  const double norm = std::sqrt(sq);
  std::vector<double> out(scores.begin(), scores.end());
  if (norm == 0.0) return out;
  for (double& s : out) s /= norm;
  return out;
}

DailySignal daily_sentiment(std::string ticker, Date date, std::span<const double> signed_scores) {
  DailySignal sig{std::move(ticker), date, 0.0};
  if (signed_scores.empty()) return sig;
  for (double v : normalize_day(signed_scores)) sig.sentiment_value += v;
  return sig;
}

std::optional<std::size_t> assign_trading_day(std::span<const Date> trading_days, Date day) {
  if (trading_days.empty() || day < trading_days.front()) return std::nullopt;
  auto it = std::lower_bound(trading_days.begin(), trading_days.end(), day);
  if (it == trading_days.end()) return std::nullopt;
  return static_cast<std::size_t>(it - trading_days.begin());
}

SignalBuild build_daily_signals(const std::string& ticker, std::span<const Date> trading_days,
                                std::span<const TweetRecord> tweets, const KeywordDictionary& dict,
                                const InfluencerMap& influencers, const SentimentProvider& provider,
                                const SignalConfig& config, int max_in_flight) {
  config.validate();
  SignalBuild out;

  struct Candidate {
    const TweetRecord* tweet;
    MatchKind match;
    std::size_t day;
  };
  std::vector<Candidate> matched;
  for (const auto& t : tweets) {
    const auto kind = match_tweet(t.text, dict);
    if (kind == MatchKind::None) {
      ++out.stats.unmatched;
      continue;
    }
    ++(kind == MatchKind::Main ? out.stats.main_matches : out.stats.related_matches);
    const auto day = assign_trading_day(trading_days, local_date(t.created_at, config.utc_offset_minutes));
    if (!day) {
      ++out.stats.outside_calendar;
      continue;
    }
    matched.push_back({&t, kind, *day});
  }

  std::vector<ScoreRequest> requests;
  requests.reserve(matched.size());
  for (const auto& c : matched) requests.push_back({c.tweet->id, c.tweet->text});
  const auto sentiments = score_all(provider, requests, max_in_flight);

  std::vector<std::vector<double>> per_day(trading_days.size());
  for (std::size_t i = 0; i < matched.size(); ++i) {
    if (!sentiments[i]) {
      ++out.stats.unscored;
      continue;
    }
    const auto& t = *matched[i].tweet;
    const double rb = retweet_bias(config.rc_oe, t.retweet_count, config.retweet_bias_mode);
    const double ib = interaction_bias(rb, t.like_count, t.reply_count);
    auto it = influencers.find(t.author_id);
    const double is = it == influencers.end() ? 0.0 : static_cast<double>(it->second);
    const double es = effect_score(ib, is, matched[i].match, config.rp);
    per_day[matched[i].day].push_back(signed_score(es, sentiments[i]->polarity));
  }

  out.signals.reserve(trading_days.size());
  for (std::size_t d = 0; d < trading_days.size(); ++d) {
    out.signals.push_back(daily_sentiment(ticker, trading_days[d], per_day[d]));
  }
  return out;
}

}  // namespace sentitrade
