#include "sentitrade/data_ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "json.hpp"

namespace sentitrade {

namespace {

using json = nlohmann::json;

std::string at_line(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no) + ": ";
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

// Header name -> column index for the required columns, in `names` order.
template <std::size_t N>
std::array<std::size_t, N> map_header(const std::filesystem::path& path, const std::string& header,
                                      const std::array<std::string_view, N>& names) {
  const auto cols = split_csv_line(header);
  std::array<std::size_t, N> idx{};
  for (std::size_t k = 0; k < N; ++k) {
    auto it = std::find_if(cols.begin(), cols.end(), [&](const std::string& c) {
      return to_lower_ascii(trim(c)) == names[k];
    });
    if (it == cols.end()) {
      throw InputError(at_line(path, 1) + "header is missing column '" + std::string{names[k]} +
                       "'");
    }
    idx[k] = static_cast<std::size_t>(it - cols.begin());
  }
  return idx;
}

bool parse_volume(std::string_view text, std::int64_t& out) {
  long long v = 0;
  if (parse_int64(text, v)) {
    out = v;
    return true;
  }
  double d = 0.0;
  if (parse_double(text, d) && d == std::floor(d) && std::abs(d) < 9.0e18) {
    out = static_cast<std::int64_t>(d);
    return true;
  }
  return false;
}

std::string json_string_or_id(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  throw std::invalid_argument(std::string{"field '"} + key + "' must be a string");
}

std::int64_t json_count(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (v.is_number_unsigned()) return static_cast<std::int64_t>(v.get<std::uint64_t>());
  if (v.is_number_integer()) {
    const auto n = v.get<std::int64_t>();
    if (n < 0) throw std::invalid_argument(std::string{"field '"} + key + "' is negative");
    return n;
  }
  throw std::invalid_argument(std::string{"field '"} + key + "' must be a non-negative integer");
}

}  // namespace

PriceScaler::PriceScaler(double lo, double hi) : min_(lo), max_(hi) {
  if (!(lo <= hi)) throw std::invalid_argument("PriceScaler needs min <= max");
}

PriceScaler PriceScaler::fit(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot normalize an empty price series");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return PriceScaler{*lo, *hi};
}

double PriceScaler::apply(double x) const {
  if (degenerate()) return 50.0;
  return 100.0 * (x - min_) / (max_ - min_);
}

std::vector<double> PriceScaler::apply(std::span<const double> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(apply(x));
  return out;
}

std::vector<MarketBar> load_market_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": missing header row");
  constexpr std::array<std::string_view, 6> kCols = {"date", "open", "high", "low", "close",
                                                     "volume"};
  const auto idx = map_header(path, lines.front(), kCols);
  const auto needed = *std::max_element(idx.begin(), idx.end()) + 1;

  std::vector<std::pair<MarketBar, std::size_t>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const auto line_no = i + 1;
    const auto f = split_csv_line(lines[i]);
    if (f.size() < needed) {
      throw InputError(at_line(path, line_no) + "expected at least " + std::to_string(needed) +
                       " fields, got " + std::to_string(f.size()));
    }
    MarketBar bar;
    auto date = parse_date(trim(f[idx[0]]));
    if (!date) throw InputError(at_line(path, line_no) + "bad date '" + f[idx[0]] + "'");
    bar.date = *date;
    double* prices[] = {&bar.open, &bar.high, &bar.low, &bar.close};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!parse_double(f[idx[k + 1]], *prices[k])) {
        throw InputError(at_line(path, line_no) + "bad " + std::string{kCols[k + 1]} + " '" +
                         f[idx[k + 1]] + "'");
      }
    }
    if (!parse_volume(f[idx[5]], bar.volume) || bar.volume < 0) {
      throw InputError(at_line(path, line_no) + "bad volume '" + f[idx[5]] + "'");
    }
    if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close) ||
        bar.low > bar.high) {
      throw InputError(at_line(path, line_no) + "OHLC violation (low/high do not bracket open/close)");
    }
    rows.emplace_back(bar, line_no);
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first.date < b.first.date; });
  std::vector<MarketBar> bars;
  bars.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first.date == rows[i - 1].first.date) {
      throw InputError(at_line(path, rows[i].second) + "duplicate date " +
                       rows[i].first.date.iso() + " (first seen on line " +
                       std::to_string(rows[i - 1].second) + ")");
    }
    bars.push_back(rows[i].first);
  }
  return bars;
}

std::size_t for_each_tweet(const std::filesystem::path& path,
                           const std::function<void(TweetRecord&&)>& on_record,
                           const std::function<void(std::string)>& on_warning) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::unordered_set<std::string> seen;
  std::size_t skipped = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (is_blank(line)) continue;
    try {
      const auto doc = json::parse(line);
      if (!doc.is_object()) throw std::invalid_argument("not a JSON object");
      TweetRecord rec;
      rec.id = json_string_or_id(doc, "id");
      rec.author_id = json_string_or_id(doc, "author_id");
      const auto& created = doc.at("created_at");
      if (!created.is_string()) throw std::invalid_argument("field 'created_at' must be a string");
      auto ts = parse_timestamp(created.get<std::string>());
      if (!ts) throw std::invalid_argument("unparseable created_at");
      rec.created_at = *ts;
      const auto& text = doc.at("text");
      if (!text.is_string()) throw std::invalid_argument("field 'text' must be a string");
      rec.text = text.get<std::string>();
      rec.retweet_count = json_count(doc, "retweet_count");
      rec.like_count = json_count(doc, "like_count");
      rec.reply_count = json_count(doc, "reply_count");
      if (rec.id.empty()) throw std::invalid_argument("empty id");
      if (!seen.insert(rec.id).second) throw std::invalid_argument("duplicate id " + rec.id);
      on_record(std::move(rec));
    } catch (const std::exception& e) {
      ++skipped;
      on_warning(at_line(path, line_no) + "skipped: " + e.what());
    }
  }
  return skipped;
}

TweetLoadResult load_tweets_jsonl(const std::filesystem::path& path) {
  TweetLoadResult result;
  result.skipped = for_each_tweet(
      path, [&](TweetRecord&& r) { result.records.push_back(std::move(r)); },
      [&](std::string w) { result.warnings.push_back(std::move(w)); });
  return result;
}

std::vector<FollowEdge> load_follow_edges(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": missing header row");
  constexpr std::array<std::string_view, 2> kCols = {"follower", "followee"};
  const auto idx = map_header(path, lines.front(), kCols);
  std::vector<FollowEdge> edges;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() <= std::max(idx[0], idx[1])) {
      throw InputError(at_line(path, i + 1) + "expected follower,followee");
    }
    FollowEdge e{std::string{trim(f[idx[0]])}, std::string{trim(f[idx[1]])}};
    if (e.follower.empty() || e.followee.empty()) {
      throw InputError(at_line(path, i + 1) + "empty user id");
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<double> normalize_prices(std::span<const double> closes) {
  return PriceScaler::fit(closes).apply(closes);
}

NormalizedSeries normalize_prices(std::span<const MarketBar> bars) {
  NormalizedSeries out;
  std::vector<double> closes;
  closes.reserve(bars.size());
  for (const auto& b : bars) {
    out.dates.push_back(b.date);
    closes.push_back(b.close);
  }
  out.values = normalize_prices(closes);
  return out;
}

void store_daily_signals(const std::filesystem::path& path, std::span<const DailySignal> signals) {
  for (std::size_t i = 1; i < signals.size(); ++i) {
    const auto& a = signals[i - 1];
    const auto& b = signals[i];
    if (std::tie(a.ticker, a.date) >= std::tie(b.ticker, b.date)) {
      throw std::invalid_argument("daily signals must be sorted by (ticker, date) without duplicates; "
                                  "row " + std::to_string(i) + " (" + b.ticker + ", " + b.date.iso() +
                                  ") is out of order");
    }
  }
  std::string out = "ticker,date,sentiment_value\n";
  for (const auto& s : signals) {
    if (!std::isfinite(s.sentiment_value)) {
      throw std::invalid_argument("non-finite sentiment value for " + s.ticker + " " + s.date.iso());
    }
    out += csv_escape(s.ticker);
    out += ',';
    out += s.date.iso();
    out += ',';
    out += format_double(s.sentiment_value);
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<DailySignal> load_daily_signals(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<DailySignal> out;
  if (lines.empty()) return out;
  constexpr std::array<std::string_view, 3> kCols = {"ticker", "date", "sentiment_value"};
  const auto idx = map_header(path, lines.front(), kCols);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() < 3) throw InputError(at_line(path, i + 1) + "expected 3 fields");
    DailySignal s;
    s.ticker = f[idx[0]];
    auto date = parse_date(trim(f[idx[1]]));
    if (!date) throw InputError(at_line(path, i + 1) + "bad date '" + f[idx[1]] + "'");
    s.date = *date;
    if (!parse_double(f[idx[2]], s.sentiment_value)) {
      throw InputError(at_line(path, i + 1) + "bad sentiment_value '" + f[idx[2]] + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sentitrade
