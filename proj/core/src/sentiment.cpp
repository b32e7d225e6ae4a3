#include "sentitrade/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "sentitrade/io_util.hpp"
#include "sentitrade/text.hpp"

namespace sentitrade {

namespace {

std::unordered_set<std::string> fold_words(std::span<const std::string> words) {
  std::unordered_set<std::string> out;
  for (const auto& w : words) {
    auto f = fold_text(w);
    if (!f.empty()) out.insert(std::move(f));
  }
  return out;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::vector<std::string> words;
  for (const auto& line : read_lines(path)) {
    const auto w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.emplace_back(w);
  }
  return words;
}

struct HitCounts {
  int positive = 0;
  int negative = 0;
};

HitCounts count_hits(std::string_view text, const std::unordered_set<std::string>& pos,
                     const std::unordered_set<std::string>& neg) {
  HitCounts c;
  for (const auto& tok : tokenize_folded(fold_text(text))) {
    if (pos.count(tok)) ++c.positive;
    if (neg.count(tok)) ++c.negative;
  }
  return c;
}

Polarity majority(const HitCounts& c) {
  if (c.positive > c.negative) return Polarity::Positive;
  if (c.negative > c.positive) return Polarity::Negative;
  return Polarity::Neutral;
}

}  // namespace

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
  }
  return "?";
}

std::optional<Polarity> parse_polarity(std::string_view label) {
  const auto l = to_lower_ascii(trim(label));
  if (l == "positive") return Polarity::Positive;
  if (l == "negative") return Polarity::Negative;
  if (l == "neutral") return Polarity::Neutral;
  return std::nullopt;
}

LexiconProvider::LexiconProvider(std::span<const std::string> positive,
                                 std::span<const std::string> negative)
    : positive_(fold_words(positive)), negative_(fold_words(negative)) {
  for (const auto& w : positive_) {
    if (negative_.count(w)) {
      throw std::invalid_argument("lexicon word '" + w + "' is both positive and negative");
    }
  }
}

LexiconProvider LexiconProvider::from_files(const std::filesystem::path& positive,
                                            const std::filesystem::path& negative) {
  const auto pos = read_word_list(positive);
  const auto neg = read_word_list(negative);
  return LexiconProvider{pos, neg};
}

std::optional<SentimentResult> LexiconProvider::score(std::string_view, std::string_view text) const {
  const auto hits = count_hits(text, positive_, negative_);
  const int total = hits.positive + hits.negative;
  SentimentResult r;
  r.polarity = majority(hits);
  r.confidence = total == 0 ? 0.0
                            : static_cast<double>(std::abs(hits.positive - hits.negative)) / total;
  return r;
}

Polarity lexicon_polarity(std::string_view text, const std::unordered_set<std::string>& pos_words,
                          const std::unordered_set<std::string>& neg_words) {
  return majority(count_hits(text, pos_words, neg_words));
}

PrescoredProvider PrescoredProvider::from_file(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw InputError(path.string() + ": missing header row");
  const auto header = split_csv_line(lines.front());
  if (header.size() != 3 || trim(header[0]) != "tweet_id" || trim(header[1]) != "label" ||
      trim(header[2]) != "confidence") {
    throw InputError(path.string() + ":1: expected header tweet_id,label,confidence");
  }
  std::unordered_map<std::string, SentimentResult> table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(i + 1) + ": ";
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 3) throw InputError(where + "expected 3 fields");
    auto pol = parse_polarity(f[1]);
    double conf = 0.0;
    if (!pol) throw InputError(where + "unknown label '" + f[1] + "'");
    if (!parse_double(f[2], conf) || conf < 0.0 || conf > 1.0) {
      throw InputError(where + "confidence must be in [0, 1]");
    }
    if (!table.emplace(f[0], SentimentResult{*pol, conf}).second) {
      throw InputError(where + "duplicate tweet_id '" + f[0] + "'");
    }
  }
  return PrescoredProvider{std::move(table)};
}

std::optional<SentimentResult> PrescoredProvider::score(std::string_view tweet_id,
                                                        std::string_view) const {
  auto it = table_.find(std::string{tweet_id});
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

RemoteProvider::RemoteProvider(RemoteOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw std::invalid_argument("remote endpoint is empty");
  if (options_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (options_.max_in_flight < 1) throw std::invalid_argument("max_in_flight must be >= 1");
}

std::optional<SentimentResult> RemoteProvider::request(std::string_view text) const {
  httplib::Client client(options_.endpoint);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  const std::string body = nlohmann::json{{"text", std::string{text}}}.dump();

  auto delay = options_.backoff;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    ++requests_;
    auto res = client.Post("/score", body, "application/json");
    if (!res || res->status != 200) continue;
    try {
      const auto doc = nlohmann::json::parse(res->body);
      auto pol = parse_polarity(doc.at("label").get<std::string>());
      const double conf = doc.at("confidence").get<double>();
      if (!pol || !(conf >= 0.0 && conf <= 1.0)) continue;
      return SentimentResult{*pol, conf};
    } catch (const std::exception&) {
      continue;  // malformed body counts as a failed attempt
    }
  }
  ++failures_;
  return std::nullopt;
}

std::optional<SentimentResult> RemoteProvider::score(std::string_view tweet_id,
                                                     std::string_view text) const {
  const std::string key = tweet_id.empty() ? "text:" + std::string{text} : std::string{tweet_id};
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto result = request(text);
  std::unique_lock lock(cache_mutex_);
  // First writer wins so concurrent duplicate requests still agree.
  return cache_.emplace(key, result).first->second;
}

void RemoteProvider::save_cache(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, SentimentResult>> rows;
  {
    std::shared_lock lock(cache_mutex_);
    for (const auto& [id, r] : cache_) {
      if (r && id.rfind("text:", 0) != 0) rows.emplace_back(id, *r);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "tweet_id,label,confidence\n";
  for (const auto& [id, r] : rows) {
    out += csv_escape(id) + "," + std::string{to_string(r.polarity)} + "," +
           format_double(r.confidence) + "\n";
  }
  write_text_file(path, out);
}

std::unique_ptr<SentimentProvider> make_provider(const ProviderSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::unique_ptr<SentimentProvider> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RemoteOptions>) {
          return std::make_unique<RemoteProvider>(s);
        } else if constexpr (std::is_same_v<T, PrescoredSpec>) {
          return std::make_unique<PrescoredProvider>(PrescoredProvider::from_file(s.path));
        } else {
          return std::make_unique<LexiconProvider>(LexiconProvider::from_files(s.positive, s.negative));
        }
      },
      spec);
}

std::vector<std::optional<SentimentResult>> score_all(const SentimentProvider& provider,
                                                      std::span<const ScoreRequest> requests,
                                                      int max_in_flight) {
  std::vector<std::optional<SentimentResult>> out(requests.size());
  const auto workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, max_in_flight)), requests.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < requests.size(); ++i) {
      out[i] = provider.score(requests[i].tweet_id, requests[i].text);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < requests.size(); i = next++) {
        out[i] = provider.score(requests[i].tweet_id, requests[i].text);
      }
    });
  }
  pool.clear();  // join before handing out the results
  return out;
}

}  // namespace sentitrade
