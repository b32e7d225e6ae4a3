#include "sentitrade/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "sentitrade/io_util.hpp"

namespace sentitrade {

namespace {

// Distribution code is written out by hand so the bundled fixture does not
// depend on a particular standard library's <random> distributions.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  bool coin(double p = 0.5) { return unit() < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

 private:
  std::mt19937_64 rng_;
};

double round4(double x) { return std::round(x * 1e4) / 1e4; }

bool is_weekday(Date d) {
  const auto wd = d.weekday();
  return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

const std::vector<std::string> kPositive = {"yükseliş", "güçlü", "rekor",  "kazanç",
                                            "olumlu",   "rally", "bullish", "strong"};
const std::vector<std::string> kNegative = {"düşüş", "zayıf",   "kayıp",   "zarar",
                                            "olumsuz", "selloff", "bearish", "weak"};
const std::vector<std::string> kFiller = {"bugün", "hisse", "piyasa",   "grafik", "takipte", "today",
                                          "shares", "market", "watching", "seans",  "hacim",   "chart"};

// ASCII spelling of a few Turkish words, as people often type them.
std::string ascii_variant(const std::string& w) {
  static const std::vector<std::pair<std::string, std::string>> map = {
      {"ü", "u"}, {"ş", "s"}, {"ğ", "g"}, {"ı", "i"}, {"ö", "o"}, {"ç", "c"}};
  std::string out = w;
  for (const auto& [from, to] : map) {
    for (std::size_t pos = out.find(from); pos != std::string::npos; pos = out.find(from, pos)) {
      out.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  return out;
}

std::string timestamp_text(Date d, std::size_t seconds_of_day) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02zu:%02zu:%02zuZ", seconds_of_day / 3600, seconds_of_day / 60 % 60,
                seconds_of_day % 60);
  return d.iso() + buf;
}

}  // namespace

std::vector<SyntheticTicker> default_synthetic_tickers() {
  SyntheticTicker alfa;
  alfa.ticker = "ALFA";
  alfa.entity = "Alfa Holding";
  alfa.first_close = 100.0;
  alfa.main_extra = {"#ALFA"};
  alfa.relations = {{"Alfa Holding", RelationType::LocationCountry, "Türkiye"},
                    {"Alfa Holding", RelationType::KeyPerson, "Ayşe Kaya"},
                    {"Alfa Holding", RelationType::Subsidiary, "Alfa Sigorta"},
                    {"Alfa Holding", RelationType::Product, "AlfaKart"}};
  alfa.main_mentions = {"Alfa Holding", "ALFA HOLDİNG", "alfa holding", "#ALFA"};
  alfa.related_mentions = {"Türkiye", "turkiye", "Ayşe Kaya", "AYSE KAYA", "Alfa Sigorta", "alfakart"};

  SyntheticTicker beta;
  beta.ticker = "BETA";
  beta.entity = "Beta Enerji";
  beta.first_close = 40.0;
  beta.main_extra = {"#BETA"};
  beta.relations = {{"Beta Enerji", RelationType::RegionServed, "Ege Bölgesi"},
                    {"Beta Enerji", RelationType::KeyPeople, "Mehmet Öztürk"},
                    {"Beta Enerji", RelationType::ParentCompany, "Gama Grup"},
                    {"Beta Enerji", RelationType::Product, "BetaSolar"}};
  beta.main_mentions = {"Beta Enerji", "BETA ENERJİ", "beta enerji", "#BETA"};
  beta.related_mentions = {"Ege Bölgesi", "ege bolgesi", "Mehmet Öztürk", "mehmet ozturk", "GAMA GRUP",
                           "BetaSolar"};
  return {alfa, beta};
}

SyntheticDataset make_synthetic_market(const SyntheticOptions& options) {
  if (options.trading_days < 2) throw std::invalid_argument("synthetic market needs at least 2 days");
  if (options.users < options.influencers + 110) {
    throw std::invalid_argument("synthetic market needs at least influencers + 110 users");
  }
  if (!(options.min_move > 0.0 && options.min_move <= options.max_move && options.max_move < 0.5)) {
    throw std::invalid_argument("synthetic move range must satisfy 0 < min <= max < 0.5");
  }
  Draw draw(options.seed);
  SyntheticDataset data;
  data.tickers = options.tickers.empty() ? default_synthetic_tickers() : options.tickers;
  data.positive_words = kPositive;
  data.negative_words = kNegative;

  std::vector<Date> days;
  for (Date d = options.first_day; days.size() < options.trading_days; d = d.plus_days(1)) {
    if (is_weekday(d)) days.push_back(d);
  }

  // Prices: the sign drawn for day t is the sign of close[t+1] - close[t].
  for (const auto& tk : data.tickers) {
    for (const auto& r : tk.relations) data.relations.push_back(r);
    std::vector<int> sign(days.size());
    for (auto& s : sign) s = draw.coin() ? 1 : -1;
    std::vector<double> close(days.size());
    close[0] = round4(tk.first_close);
    for (std::size_t t = 1; t < days.size(); ++t) {
      const double m = options.min_move + (options.max_move - options.min_move) * draw.unit();
      close[t] = round4(close[t - 1] * (1.0 + sign[t - 1] * m));
      if ((close[t] - close[t - 1]) * sign[t - 1] <= 0.0) {
        throw std::logic_error("synthetic move vanished after rounding; raise min_move");
      }
    }
    auto& bars = data.bars[tk.ticker];
    for (std::size_t t = 0; t < days.size(); ++t) {
      MarketBar b;
      b.date = days[t];
      b.close = close[t];
      b.open = t == 0 ? close[0] : round4(close[t - 1] * (1.0 + (draw.unit() - 0.5) * 0.004));
      b.high = round4(std::max(b.open, b.close) * (1.0 + draw.unit() * 0.004));
      b.low = round4(std::min(b.open, b.close) * (1.0 - draw.unit() * 0.004));
      b.volume = 100000 + static_cast<std::int64_t>(draw.below(900000));
      bars.push_back(b);
    }
    data.day_sign[tk.ticker] = std::move(sign);
  }

  // Follower graph: a handful of accounts with 101..200 followers each.
  std::vector<std::string> users;
  for (std::size_t i = 1; i <= options.users; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "u%04zu", i);
    users.emplace_back(buf);
  }
  std::set<FollowEdge> edges;
  for (std::size_t k = 0; k < options.influencers; ++k) {
    const std::size_t want = 101 + draw.below(100);
    std::set<std::size_t> followers;
    while (followers.size() < want) {
      const auto f = draw.below(users.size());
      if (f != k) followers.insert(f);
    }
    for (auto f : followers) edges.insert({users[f], users[k]});
  }
  for (std::size_t u = options.influencers; u < users.size(); ++u) {
    const std::size_t n = 1 + draw.below(5);
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = options.influencers + draw.below(users.size() - options.influencers);
      if (v != u) edges.insert({users[u], users[v]});
    }
  }
  data.edges.assign(edges.begin(), edges.end());

  // Tweets.
  std::size_t next_id = 1;
  auto author = [&]() -> const std::string& {
    return draw.coin(0.3) ? users[draw.below(options.influencers)] : draw.pick(users);
  };
  auto add = [&](Date d, std::string text) {
    TweetRecord t;
    char buf[24];
    std::snprintf(buf, sizeof buf, "t%06zu", next_id++);
    t.id = buf;
    t.author_id = author();
    t.created_at = *parse_timestamp(timestamp_text(d, draw.below(86400)));
    t.text = std::move(text);
    t.retweet_count = static_cast<std::int64_t>(draw.below(4) == 0 ? draw.below(60) : draw.below(5));
    t.like_count = static_cast<std::int64_t>(draw.below(200));
    t.reply_count = static_cast<std::int64_t>(draw.below(20));
    data.tweets.push_back(std::move(t));
  };
  auto polar_word = [&](int sign) {
    const auto& w = draw.pick(sign > 0 ? kPositive : kNegative);
    return draw.coin(0.3) ? ascii_variant(w) : w;
  };
  auto mention = [&](const SyntheticTicker& tk) {
    return draw.coin(0.7) ? draw.pick(tk.main_mentions) : draw.pick(tk.related_mentions);
  };
  auto polar_tweet = [&](const SyntheticTicker& tk, int sign) {
    std::string text = draw.pick(kFiller) + " " + mention(tk) + " " + polar_word(sign);
    if (draw.coin(0.4)) text += " " + polar_word(sign);
    return text + " " + draw.pick(kFiller);
  };

  const Date first = days.front();
  const Date last = days.back();
  // A few matched tweets outside the price calendar on either side.
  for (const auto& tk : data.tickers) {
    add(first.plus_days(-3), polar_tweet(tk, 1));
    add(last.plus_days(2), polar_tweet(tk, -1));
  }
  std::size_t next_trading = 0;
  for (Date d = first; d <= last; d = d.plus_days(1)) {
    while (days[next_trading] < d) ++next_trading;
    const bool trading = days[next_trading] == d;
    for (const auto& tk : data.tickers) {
      const int sign = data.day_sign.at(tk.ticker)[next_trading];
      if (!trading) {
        for (std::size_t k = draw.below(3); k > 0; --k) add(d, polar_tweet(tk, sign));
        continue;
      }
      for (std::size_t k = 2 + draw.below(3); k > 0; --k) add(d, polar_tweet(tk, sign));
      if (draw.coin(0.5)) add(d, draw.pick(kFiller) + " " + mention(tk) + " " + draw.pick(kFiller));
      for (std::size_t k = draw.below(3); k > 0; --k) {
        add(d, draw.pick(kFiller) + " " + polar_word(draw.coin() ? 1 : -1) + " " + draw.pick(kFiller));
      }
    }
  }
  std::stable_sort(data.tweets.begin(), data.tweets.end(),
                   [](const TweetRecord& a, const TweetRecord& b) { return a.created_at < b.created_at; });
  return data;
}

void write_synthetic_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  for (const auto& [ticker, bars] : data.bars) {
    std::string csv = "date,open,high,low,close,volume\n";
    for (const auto& b : bars) {
      csv += b.date.iso() + "," + format_double(b.open) + "," + format_double(b.high) + "," +
             format_double(b.low) + "," + format_double(b.close) + "," + std::to_string(b.volume) + "\n";
    }
    write_text_file(dir / "prices" / (ticker + ".csv"), csv);
  }

  std::string jsonl;
  for (const auto& t : data.tweets) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["author_id"] = t.author_id;
    const auto day = std::chrono::floor<std::chrono::days>(t.created_at);
    j["created_at"] = timestamp_text(Date{day}, static_cast<std::size_t>((t.created_at - day).count()));
    j["text"] = t.text;
    j["retweet_count"] = t.retweet_count;
    j["like_count"] = t.like_count;
    j["reply_count"] = t.reply_count;
    jsonl += j.dump() + "\n";
  }
  write_text_file(dir / "tweets.jsonl", jsonl);

  std::string edges = "follower,followee\n";
  for (const auto& e : data.edges) edges += e.follower + "," + e.followee + "\n";
  write_text_file(dir / "edges.csv", edges);

  std::string rel = "source_entity,relation_type,target_label\n";
  for (const auto& r : data.relations) {
    rel += csv_escape(r.source_entity) + "," + std::string{to_string(r.relation_type)} + "," +
           csv_escape(r.target_label) + "\n";
  }
  write_text_file(dir / "relations.csv", rel);

  std::string pos, neg;
  for (const auto& w : data.positive_words) pos += w + "\n";
  for (const auto& w : data.negative_words) neg += w + "\n";
  write_text_file(dir / "lexicon" / "positive.txt", pos);
  write_text_file(dir / "lexicon" / "negative.txt", neg);
}

}  // namespace sentitrade
