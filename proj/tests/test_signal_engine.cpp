#include <gtest/gtest.h>

#include <cmath>

#include "sentitrade/signal_engine.hpp"
#include "test_support.hpp"

using namespace sentitrade;

TEST(Formulas, RetweetBias) {
  EXPECT_EQ(retweet_bias(2, 10), 12.0);
  EXPECT_EQ(retweet_bias(0, 0), 0.0);
  EXPECT_EQ(retweet_bias(2, 0), 2.0);
  EXPECT_EQ(retweet_bias(2, 10, RetweetBiasMode::Multiplicative), 20.0);
}

TEST(Formulas, InteractionBias) {
  EXPECT_EQ(interaction_bias(12, 5, 3), 20.0);
  EXPECT_EQ(interaction_bias(0, 0, 0), 0.0);
  EXPECT_EQ(interaction_bias(2, 0, 1), 3.0);
}

TEST(Formulas, EffectScore) {
  EXPECT_EQ(effect_score(20, 80, MatchKind::Main), 100.0);
  EXPECT_EQ(effect_score(20, 80, MatchKind::Related), 25.0);
  EXPECT_EQ(effect_score(0, 0, MatchKind::Main), 0.0);
  EXPECT_THROW(effect_score(1, 1, MatchKind::None), std::invalid_argument);
}

TEST(Formulas, SignedScore) {
  EXPECT_EQ(signed_score(25, Polarity::Positive), 25.0);
  EXPECT_EQ(signed_score(25, Polarity::Negative), -25.0);
  EXPECT_EQ(signed_score(100, Polarity::Neutral), 0.0);
}

TEST(Formulas, NormalizeDay) {
  EXPECT_EQ(normalize_day(std::vector<double>{3, 4}), (std::vector<double>{0.6, 0.8}));
  EXPECT_EQ(normalize_day(std::vector<double>{0, 0}), (std::vector<double>{0, 0}));
  EXPECT_EQ(normalize_day(std::vector<double>{7}), (std::vector<double>{1}));
  EXPECT_EQ(normalize_day(std::vector<double>{-7}), (std::vector<double>{-1}));
  EXPECT_THROW(normalize_day(std::vector<double>{}), std::invalid_argument);
}

TEST(Formulas, DailySentiment) {
  EXPECT_DOUBLE_EQ(daily_sentiment("X", Date(2020, 1, 2), std::vector<double>{3, 4}).sentiment_value, 1.4);
  EXPECT_EQ(daily_sentiment("X", Date(2020, 1, 2), {}).sentiment_value, 0.0);
  EXPECT_EQ(daily_sentiment("X", Date(2020, 1, 2), std::vector<double>{1234.5}).sentiment_value, 1.0);
  EXPECT_EQ(daily_sentiment("X", Date(2020, 1, 2), std::vector<double>{-0.25}).sentiment_value, -1.0);
}

TEST(Formulas, RandomizedProperties) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 2000; ++i) {
    const double ib = support::uniform(rng, 0, 1e4), is = support::uniform(rng, 0, 1e5);
    const double rp = support::uniform(rng, 0.5, 10);
    EXPECT_EQ(effect_score(ib, is, MatchKind::Related, rp), effect_score(ib, is, MatchKind::Main, rp) / rp);
    EXPECT_EQ(signed_score(ib, Polarity::Neutral), 0.0);

    std::vector<double> day(1 + support::uniform_index(rng, 30));
    for (auto& v : day) v = support::uniform(rng, -100, 100) * static_cast<double>(rng() % 3 != 0);
    const double c = support::uniform(rng, 1e-3, 1e3);
    std::vector<double> scaled(day);
    for (auto& v : scaled) v *= c;
    const double a = daily_sentiment("X", Date(2020, 1, 2), day).sentiment_value;
    const double b = daily_sentiment("X", Date(2020, 1, 2), scaled).sentiment_value;
    EXPECT_NEAR(a, b, 1e-12 * day.size());
    EXPECT_LE(std::abs(a), std::sqrt(static_cast<double>(day.size())) + 1e-12);
  }
}

TEST(Calendar, AssignTradingDay) {
  const std::vector<Date> days = {Date(2020, 1, 2), Date(2020, 1, 3), Date(2020, 1, 6)};
  EXPECT_EQ(assign_trading_day(days, Date(2020, 1, 2)), 0u);
  EXPECT_EQ(assign_trading_day(days, Date(2020, 1, 4)), 2u);  // Saturday rolls forward
  EXPECT_EQ(assign_trading_day(days, Date(2020, 1, 5)), 2u);
  EXPECT_FALSE(assign_trading_day(days, Date(2020, 1, 1)));
  EXPECT_FALSE(assign_trading_day(days, Date(2020, 1, 7)));
  EXPECT_FALSE(assign_trading_day({}, Date(2020, 1, 7)));
}

TEST(Config, Validation) {
  SignalConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rp = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SignalConfig{};
  c.rc_oe = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_retweet_bias_mode("Multiplicative"), RetweetBiasMode::Multiplicative);
  EXPECT_FALSE(parse_retweet_bias_mode("both"));
}

namespace {

/// Provider with a fixed answer per tweet id; unknown ids are unscored.
class TableProvider final : public SentimentProvider {
 public:
  explicit TableProvider(std::map<std::string, Polarity> t) : table_(std::move(t)) {}
  std::optional<SentimentResult> score(std::string_view id, std::string_view) const override {
    auto it = table_.find(std::string{id});
    if (it == table_.end()) return std::nullopt;
    return SentimentResult{it->second, 1.0};
  }
  std::string_view name() const override { return "table"; }

 private:
  std::map<std::string, Polarity> table_;
};

TweetRecord tweet(std::string id, std::string author, std::string when, std::string text, int rc, int lc,
                  int rep) {
  return {std::move(id), std::move(author), *parse_timestamp(when), std::move(text), rc, lc, rep};
}

}  // namespace

TEST(BuildSignals, HandComputedCorpus) {
  const std::vector<Date> days = {Date(2020, 1, 2), Date(2020, 1, 3), Date(2020, 1, 6)};
  const std::vector<EntityRelation> rel = {{"Garanti Bank", RelationType::ParentCompany, "Doğuş Holding"}};
  const std::vector<std::string> extra = {"#garan"};
  const auto dict = expand_keywords("Garanti Bank", rel, extra);
  const InfluencerMap inf = {{"big", 80}, {"small", 0}};
  const std::vector<TweetRecord> tweets = {
      tweet("1", "big", "2020-01-02T09:00:00Z", "#garan güzel", 10, 5, 3),           // Main, +
      tweet("2", "nobody", "2020-01-02T10:00:00Z", "Doğuş Holding kötü", 0, 2, 0),  // Related, -
      tweet("3", "small", "2020-01-02T11:00:00Z", "hava güzel", 100, 0, 0),         // unmatched
      tweet("4", "big", "2020-01-03T12:00:00Z", "#garan", 0, 0, 0),                 // Main, neutral
      tweet("5", "small", "2020-01-03T13:00:00Z", "#garan", 1, 1, 1),               // Main, +
      tweet("6", "small", "2020-01-03T14:00:00Z", "#garan", 1, 1, 1),               // unscored
      tweet("7", "small", "2020-01-04T14:00:00Z", "#GARAN", 4, 0, 0),               // Saturday -> 01-06, -
      tweet("8", "small", "2020-01-01T14:00:00Z", "#garan", 4, 0, 0),               // before calendar
  };
  const TableProvider provider({{"1", Polarity::Positive},
                                {"2", Polarity::Negative},
                                {"3", Polarity::Positive},
                                {"4", Polarity::Neutral},
                                {"5", Polarity::Positive},
                                {"7", Polarity::Negative},
                                {"8", Polarity::Positive}});
  const auto built = build_daily_signals("GARAN", days, tweets, dict, inf, provider, SignalConfig{});

  // Day 1: ES1 = (2+10)+5+3+80 = 100; ES2 = ((2+0)+2+0+0)/4 = 1 -> [100, -1].
  const double n1 = std::sqrt(100.0 * 100.0 + 1.0);
  // Day 2: ES4 = 2+80 = 82 (neutral -> 0), ES5 = 3+1+1 = 5 -> [0, 5].
  // Day 3: ES7 = 6 -> [-6].
  ASSERT_EQ(built.signals.size(), 3u);
  EXPECT_DOUBLE_EQ(built.signals[0].sentiment_value, 100.0 / n1 - 1.0 / n1);
  EXPECT_DOUBLE_EQ(built.signals[1].sentiment_value, 1.0);
  EXPECT_DOUBLE_EQ(built.signals[2].sentiment_value, -1.0);
  EXPECT_EQ(built.signals[2].date, Date(2020, 1, 6));
  EXPECT_EQ(built.stats.main_matches, 6u);
  EXPECT_EQ(built.stats.related_matches, 1u);
  EXPECT_EQ(built.stats.unmatched, 1u);
  EXPECT_EQ(built.stats.unscored, 1u);
  EXPECT_EQ(built.stats.outside_calendar, 1u);
}

TEST(BuildSignals, UnscoredIsNotNeutral) {
  const std::vector<Date> days = {Date(2020, 1, 2)};
  const auto dict = expand_keywords("Acme", {}, {});
  const std::vector<TweetRecord> tweets = {tweet("a", "u", "2020-01-02T09:00:00Z", "acme", 1, 0, 0),
                                           tweet("b", "u", "2020-01-02T09:00:00Z", "acme", 1, 0, 0)};
  // With b unscored the day is a single positive term: value 1.
  const auto unscored = build_daily_signals("A", days, tweets, dict, {}, TableProvider({{"a", Polarity::Positive}}),
                                            SignalConfig{});
  EXPECT_EQ(unscored.signals[0].sentiment_value, 1.0);
  // With b neutral it still adds nothing to the sum, but it is part of the norm.
  const auto neutral = build_daily_signals(
      "A", days, tweets, dict, {}, TableProvider({{"a", Polarity::Positive}, {"b", Polarity::Neutral}}),
      SignalConfig{});
  EXPECT_EQ(neutral.signals[0].sentiment_value, 1.0);
  const std::vector<TweetRecord> three = {tweets[0], tweets[1], tweet("c", "u", "2020-01-02T09:00:00Z", "acme", 1, 0, 0)};
  const auto mixed = build_daily_signals(
      "A", days, three, dict, {},
      TableProvider({{"a", Polarity::Positive}, {"b", Polarity::Neutral}, {"c", Polarity::Positive}}), SignalConfig{});
  EXPECT_DOUBLE_EQ(mixed.signals[0].sentiment_value, std::sqrt(2.0));
}

TEST(BuildSignals, UtcOffsetMovesTweetAcrossDays) {
  const std::vector<Date> days = {Date(2020, 1, 2), Date(2020, 1, 3)};
  const auto dict = expand_keywords("Acme", {}, {});
  const std::vector<TweetRecord> tweets = {tweet("a", "u", "2020-01-02T22:30:00Z", "acme", 0, 0, 0)};
  const TableProvider p({{"a", Polarity::Negative}});
  SignalConfig utc;
  EXPECT_EQ(build_daily_signals("A", days, tweets, dict, {}, p, utc).signals[0].sentiment_value, -1.0);
  SignalConfig istanbul;
  istanbul.utc_offset_minutes = 180;
  const auto b = build_daily_signals("A", days, tweets, dict, {}, p, istanbul);
  EXPECT_EQ(b.signals[0].sentiment_value, 0.0);
  EXPECT_EQ(b.signals[1].sentiment_value, -1.0);
}

TEST(BuildSignals, DeterministicAndIndependentOfConcurrency) {
  std::mt19937_64 rng(43);
  std::vector<Date> days;
  for (Date d{2020, 1, 1}; days.size() < 30; d = d.plus_days(1)) {
    if (d.weekday() != std::chrono::Saturday && d.weekday() != std::chrono::Sunday) days.push_back(d);
  }
  const std::vector<std::string> pos = {"iyi"}, neg = {"kötü"};
  const LexiconProvider lex(pos, neg);
  const auto dict = expand_keywords("Acme", {}, std::vector<std::string>{"#acme"});
  std::vector<TweetRecord> tweets;
  const char* texts[] = {"acme iyi", "#acme kötü", "acme", "iyi", "ACME İYİ iyi kötü"};
  for (int i = 0; i < 400; ++i) {
    const auto day = days.front().plus_days(static_cast<int>(support::uniform_index(rng, 45)));
    tweets.push_back(tweet(std::to_string(i), "u" + std::to_string(rng() % 20), day.iso() + "T12:00:00Z",
                           texts[rng() % 5], static_cast<int>(rng() % 50), static_cast<int>(rng() % 50),
                           static_cast<int>(rng() % 5)));
  }
  InfluencerMap inf;
  for (int i = 0; i < 20; i += 3) inf["u" + std::to_string(i)] = 150 + i;
  const auto a = build_daily_signals("A", days, tweets, dict, inf, lex, SignalConfig{}, 1);
  const auto b = build_daily_signals("A", days, tweets, dict, inf, lex, SignalConfig{}, 4);
  EXPECT_EQ(a.signals, b.signals);
  EXPECT_EQ(a.signals.size(), days.size());
}
