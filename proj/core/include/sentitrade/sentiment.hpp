#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace sentitrade {

enum class Polarity { Positive, Negative, Neutral };

/// Positive -> +1, Negative -> -1, Neutral -> 0.
constexpr int numeric_value(Polarity p) {
  switch (p) {
    case Polarity::Positive: return 1;
    case Polarity::Negative: return -1;
    case Polarity::Neutral: return 0;
  }
  return 0;
}

std::string_view to_string(Polarity p);
/// "positive" | "negative" | "neutral", case-insensitive.
std::optional<Polarity> parse_polarity(std::string_view label);

struct SentimentResult {
  Polarity polarity = Polarity::Neutral;
  double confidence = 0.0;  // in [0, 1]

  friend bool operator==(const SentimentResult&, const SentimentResult&) = default;
};

/// Backend contract. An empty optional means the record could not be scored
/// and must be left out of aggregation (it is not a neutral vote).
class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  virtual std::optional<SentimentResult> score(std::string_view tweet_id,
                                               std::string_view text) const = 0;
  virtual std::string_view name() const = 0;
};

/// Word-list classifier; both sets are stored folded.
class LexiconProvider final : public SentimentProvider {
 public:
  /// Throws std::invalid_argument if the folded sets overlap.
  LexiconProvider(std::span<const std::string> positive, std::span<const std::string> negative);
  /// One word per line; blank lines and lines starting with '#' are ignored.
  static LexiconProvider from_files(const std::filesystem::path& positive,
                                    const std::filesystem::path& negative);

  /// Polarity by majority of token hits; confidence = |pos - neg| / (pos + neg),
  /// 0 when nothing hit.
  std::optional<SentimentResult> score(std::string_view tweet_id,
                                       std::string_view text) const override;
  std::string_view name() const override { return "lexicon"; }

  const std::unordered_set<std::string>& positive() const { return positive_; }
  const std::unordered_set<std::string>& negative() const { return negative_; }

 private:
  std::unordered_set<std::string> positive_;
  std::unordered_set<std::string> negative_;
};

/// Counts folded-token hits: Positive if pos > neg, Negative if neg > pos,
/// otherwise Neutral. The sets must hold folded words.
Polarity lexicon_polarity(std::string_view text, const std::unordered_set<std::string>& pos_words,
                          const std::unordered_set<std::string>& neg_words);

/// Lookup table keyed by tweet id (`tweet_id,label,confidence` CSV).
class PrescoredProvider final : public SentimentProvider {
 public:
  explicit PrescoredProvider(std::unordered_map<std::string, SentimentResult> table)
      : table_(std::move(table)) {}
  static PrescoredProvider from_file(const std::filesystem::path& path);

  std::optional<SentimentResult> score(std::string_view tweet_id,
                                       std::string_view text) const override;
  std::string_view name() const override { return "prescored"; }
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, SentimentResult> table_;
};

struct RemoteOptions {
  std::string endpoint;  // "http://host:port"
  std::chrono::milliseconds timeout{5000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubled after each failed attempt
  int max_in_flight = 8;
};

/// Classifier behind `POST /score` with body {"text": ...}, answering
/// {"label": ..., "confidence": ...}. Results (including failures) are cached
/// by tweet id, so repeated calls within a run agree.
class RemoteProvider final : public SentimentProvider {
 public:
  explicit RemoteProvider(RemoteOptions options);

  std::optional<SentimentResult> score(std::string_view tweet_id,
                                       std::string_view text) const override;
  std::string_view name() const override { return "remote"; }

  const RemoteOptions& options() const { return options_; }
  std::size_t failures() const { return failures_.load(); }
  std::size_t requests() const { return requests_.load(); }

  /// Successful results as a pre-scored CSV, sorted by id.
  void save_cache(const std::filesystem::path& path) const;

 private:
  std::optional<SentimentResult> request(std::string_view text) const;

  RemoteOptions options_;
  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<std::string, std::optional<SentimentResult>> cache_;
  mutable std::atomic<std::size_t> failures_{0};
  mutable std::atomic<std::size_t> requests_{0};
};

struct LexiconSpec {
  std::filesystem::path positive;
  std::filesystem::path negative;
};
struct PrescoredSpec {
  std::filesystem::path path;
};
using ProviderSpec = std::variant<RemoteOptions, PrescoredSpec, LexiconSpec>;

std::unique_ptr<SentimentProvider> make_provider(const ProviderSpec& spec);

struct ScoreRequest {
  std::string_view tweet_id;
  std::string_view text;
};

/// Scores every request, using up to `max_in_flight` worker threads. Output
/// order matches input order regardless of concurrency.
std::vector<std::optional<SentimentResult>> score_all(const SentimentProvider& provider,
                                                      std::span<const ScoreRequest> requests,
                                                      int max_in_flight = 1);

}  // namespace sentitrade
