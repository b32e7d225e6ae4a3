#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sentitrade/data_ingest.hpp"
#include "sentitrade/io_util.hpp"
#include "test_support.hpp"

using namespace sentitrade;
using support::TempDir;

namespace {
const std::string kHeader = "date,open,high,low,close,volume\n";
}

TEST(MarketCsv, HeaderOnlyIsEmpty) {
  TempDir dir;
  EXPECT_TRUE(load_market_csv(dir.write("p.csv", kHeader)).empty());
}

TEST(MarketCsv, SingleRow) {
  TempDir dir;
  const auto bars = load_market_csv(dir.write("p.csv", kHeader + "2020-01-02,9.5,10.0,9.4,9.8,1000\n"));
  ASSERT_EQ(bars.size(), 1u);
  EXPECT_EQ(bars[0].date, Date(2020, 1, 2));
  EXPECT_EQ(bars[0].open, 9.5);
  EXPECT_EQ(bars[0].high, 10.0);
  EXPECT_EQ(bars[0].low, 9.4);
  EXPECT_EQ(bars[0].close, 9.8);
  EXPECT_EQ(bars[0].volume, 1000);
}

TEST(MarketCsv, LowAboveHighNamesLine) {
  TempDir dir;
  const auto p = dir.write("p.csv", kHeader + "2020-01-02,9.5,10.0,9.4,9.8,1000\n2020-01-03,9.5,9.0,9.6,9.5,10\n");
  try {
    load_market_csv(p);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(MarketCsv, RejectsDuplicateDatesAndBadFields) {
  TempDir dir;
  EXPECT_THROW(load_market_csv(dir.write("a.csv", kHeader + "2020-01-02,1,1,1,1,1\n2020-01-02,1,1,1,1,1\n")),
               InputError);
  EXPECT_THROW(load_market_csv(dir.write("b.csv", kHeader + "2020-01-02,1,x,1,1,1\n")), InputError);
  EXPECT_THROW(load_market_csv(dir.write("c.csv", kHeader + "2020-01-02,1,1,1,1,-5\n")), InputError);
  EXPECT_THROW(load_market_csv(dir.write("d.csv", "date,open,high,low,close\n")), InputError);
  EXPECT_THROW(load_market_csv(dir / "missing.csv"), InputError);
}

TEST(MarketCsv, SortsByDateAndAcceptsReorderedColumns) {
  TempDir dir;
  const auto p = dir.write("p.csv",
                           "Close,Date,Volume,Low,High,Open,Adj Close\n"
                           "2,2020-01-03,5,1,3,2,0\n"
                           "1,2020-01-02,5,1,1,1,0\n");
  const auto bars = load_market_csv(p);
  ASSERT_EQ(bars.size(), 2u);
  EXPECT_EQ(bars[0].date, Date(2020, 1, 2));
  EXPECT_EQ(bars[1].close, 2.0);
}

TEST(MarketCsv, GeneratedRowsSatisfyOhlcSandwich) {
  std::mt19937_64 rng(5);
  TempDir dir;
  std::string csv = kHeader;
  std::size_t valid = 0;
  Date d{2020, 1, 1};
  for (int i = 0; i < 300; ++i, d = d.plus_days(1)) {
    const double o = support::uniform(rng, 1, 100), c = support::uniform(rng, 1, 100);
    double h = std::max(o, c) + support::uniform(rng, -0.5, 2), l = std::min(o, c) - support::uniform(rng, -0.5, 2);
    const bool ok = h >= std::max(o, c) && l <= std::min(o, c);
    if (!ok) continue;
    ++valid;
    csv += d.iso() + "," + format_double(o) + "," + format_double(h) + "," + format_double(l) + "," +
           format_double(c) + ",7\n";
  }
  const auto bars = load_market_csv(dir.write("p.csv", csv));
  ASSERT_EQ(bars.size(), valid);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    EXPECT_LE(b.low, std::min(b.open, b.close));
    EXPECT_GE(b.high, std::max(b.open, b.close));
    if (i) {
      EXPECT_LT(bars[i - 1].date, b.date);
    }
  }
}

TEST(Tweets, EmptyFile) {
  TempDir dir;
  const auto r = load_tweets_jsonl(dir.write("t.jsonl", ""));
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.skipped, 0u);
}

TEST(Tweets, CountsParsed) {
  TempDir dir;
  const auto r = load_tweets_jsonl(dir.write(
      "t.jsonl",
      R"({"id":"1","author_id":"a","created_at":"2020-01-02T10:00:00Z","text":"hello","retweet_count":10,"like_count":5,"reply_count":3})"
      "\n"));
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].retweet_count, 10);
  EXPECT_EQ(r.records[0].like_count, 5);
  EXPECT_EQ(r.records[0].reply_count, 3);
  EXPECT_EQ(r.records[0].text, "hello");
}

TEST(Tweets, SchemaFailuresAreSkippedWithWarnings) {
  TempDir dir;
  const std::string ok =
      R"({"id":"1","author_id":"a","created_at":"2020-01-02T10:00:00Z","text":"x","retweet_count":0,"like_count":0,"reply_count":0})";
  const std::string lines[] = {
      R"({"id":"2","author_id":"a","created_at":"2020-01-02T10:00:00Z","retweet_count":0,"like_count":0,"reply_count":0})",
      R"({"id":"3","author_id":"a","created_at":"2020-01-02T10:00:00Z","text":"x","retweet_count":-1,"like_count":0,"reply_count":0})",
      R"({"id":"4","author_id":"a","created_at":"not a time","text":"x","retweet_count":0,"like_count":0,"reply_count":0})",
      R"({"id":"5","author_id":"a","created_at":"2020-01-02","text":"x","retweet_count":1.5,"like_count":0,"reply_count":0})",
      "{not json",
      ok,  // duplicate id
  };
  std::string body = ok + "\n\n";
  for (const auto& l : lines) body += l + "\n";
  const auto r = load_tweets_jsonl(dir.write("t.jsonl", body));
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.skipped, 6u);
  EXPECT_EQ(r.warnings.size(), 6u);
}

TEST(Tweets, NumericIdsAccepted) {
  TempDir dir;
  const auto r = load_tweets_jsonl(dir.write(
      "t.jsonl",
      R"({"id":1234567890123,"author_id":77,"created_at":"2020-01-02T10:00:00+03:00","text":"x","retweet_count":0,"like_count":0,"reply_count":0})"
      "\n"));
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].id, "1234567890123");
  EXPECT_EQ(r.records[0].author_id, "77");
  EXPECT_EQ(r.records[0].created_at, *parse_timestamp("2020-01-02T07:00:00Z"));
}

TEST(Tweets, UnreadableFileThrows) {
  TempDir dir;
  EXPECT_THROW(load_tweets_jsonl(dir / "nope.jsonl"), InputError);
}

TEST(FollowEdges, Loads) {
  TempDir dir;
  const auto e = load_follow_edges(dir.write("e.csv", "follower,followee\na,b\nc,b\n"));
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[1].follower, "c");
  EXPECT_THROW(load_follow_edges(dir.write("bad.csv", "follower,followee\na\n")), InputError);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_prices(std::vector<double>{10, 10, 10}), (std::vector<double>{50, 50, 50}));
  EXPECT_EQ(normalize_prices(std::vector<double>{0, 5, 10}), (std::vector<double>{0, 50, 100}));
  EXPECT_EQ(normalize_prices(std::vector<double>{9.8}), (std::vector<double>{50}));
  EXPECT_THROW(normalize_prices(std::vector<double>{}), std::invalid_argument);
}

TEST(Normalize, BarsKeepDates) {
  std::vector<MarketBar> bars = {{Date(2020, 1, 2), 1, 1, 1, 1, 0}, {Date(2020, 1, 3), 3, 3, 3, 3, 0}};
  const auto n = normalize_prices(bars);
  EXPECT_EQ(n.dates, (std::vector<Date>{Date(2020, 1, 2), Date(2020, 1, 3)}));
  EXPECT_EQ(n.values, (std::vector<double>{0, 100}));
}

TEST(Normalize, OrderPreservingAndAffineCovariant) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(2 + support::uniform_index(rng, 40));
    for (auto& v : x) v = std::round(support::uniform(rng, 1, 50));
    const double a = support::uniform(rng, 0.1, 10), b = support::uniform(rng, -100, 100);
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return a * v + b; });
    const auto nx = normalize_prices(x), ny = normalize_prices(y);
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_GE(nx[i], 0.0);
      EXPECT_LE(nx[i], 100.0);
      EXPECT_NEAR(nx[i], ny[i], 1e-9);
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[i] < x[j]) {
          EXPECT_LT(nx[i], nx[j]);
        }
        if (x[i] == x[j]) {
          EXPECT_EQ(nx[i], nx[j]);
        }
      }
    }
  }
}

TEST(Scaler, TrainFitReusedOutsideRange) {
  const auto s = PriceScaler::fit(std::vector<double>{10, 20});
  EXPECT_EQ(s.apply(15), 50.0);
  EXPECT_EQ(s.apply(30), 200.0);
  EXPECT_EQ(s.apply(5), -50.0);
  EXPECT_THROW(PriceScaler::fit(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(PriceScaler(2.0, 1.0), std::invalid_argument);
}

TEST(SignalStore, RoundTrip) {
  TempDir dir;
  const std::vector<DailySignal> s = {{"AKBNK", Date(2020, 1, 2), 0.1},
                                      {"AKBNK", Date(2020, 1, 3), -1.0 / 3.0},
                                      {"GARAN", Date(2020, 1, 2), 1e-300}};
  store_daily_signals(dir / "s.csv", s);
  EXPECT_EQ(load_daily_signals(dir / "s.csv"), s);
}

TEST(SignalStore, RandomRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DailySignal> s;
    for (const char* t : {"A", "B,comma", "C"}) {
      Date d{2019, 12, 30};
      for (std::size_t k = support::uniform_index(rng, 20); k > 0; --k) {
        d = d.plus_days(1 + static_cast<int>(support::uniform_index(rng, 3)));
        s.push_back({t, d, std::ldexp(support::uniform(rng, -1, 1), static_cast<int>(rng() % 40) - 20)});
      }
    }
    store_daily_signals(dir / "s.csv", s);
    EXPECT_EQ(load_daily_signals(dir / "s.csv"), s);
  }
}

TEST(SignalStore, EmptyListIsHeaderOnly) {
  TempDir dir;
  store_daily_signals(dir / "s.csv", {});
  EXPECT_EQ(support::slurp(dir / "s.csv"), "ticker,date,sentiment_value\n");
  EXPECT_TRUE(load_daily_signals(dir / "s.csv").empty());
}

TEST(SignalStore, UnsortedRejected) {
  TempDir dir;
  const std::vector<DailySignal> s = {{"A", Date(2020, 1, 3), 0.0}, {"A", Date(2020, 1, 2), 0.0}};
  EXPECT_THROW(store_daily_signals(dir / "s.csv", s), std::invalid_argument);
  const std::vector<DailySignal> dup = {{"A", Date(2020, 1, 2), 0.0}, {"A", Date(2020, 1, 2), 1.0}};
  EXPECT_THROW(store_daily_signals(dir / "s.csv", dup), std::invalid_argument);
}
