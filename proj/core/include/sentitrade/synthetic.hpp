#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sentitrade/data_ingest.hpp"
#include "sentitrade/knowledge_graph.hpp"

namespace sentitrade {

struct SyntheticTicker {
  std::string ticker;
  std::string entity;
  double first_close = 100.0;
  std::vector<std::string> main_extra;
  std::vector<EntityRelation> relations;
  /// Surface forms used in generated tweets; each matches the dictionary
  /// built from `entity`, `main_extra` and `relations`.
  std::vector<std::string> main_mentions;
  std::vector<std::string> related_mentions;
};

struct SyntheticOptions {
  std::uint64_t seed = 20200101;
  Date first_day{2020, 1, 2};
  std::size_t trading_days = 200;
  std::size_t users = 300;
  std::size_t influencers = 6;  // users with more than 100 followers
  double min_move = 0.004;      // daily relative move magnitude range
  double max_move = 0.015;
  std::vector<SyntheticTicker> tickers;  // empty: two built-in tickers
};

/// Market whose daily sentiment sign equals the sign of the next day's
/// close-to-close move. Every trading day carries at least two matched,
/// polar tweets and all matched polar tweets of a day agree, so the
/// aggregated daily value has that sign too. Weekend tweets take the
/// polarity of the trading day they roll forward to.
struct SyntheticDataset {
  std::vector<SyntheticTicker> tickers;
  std::map<std::string, std::vector<MarketBar>> bars;
  /// +1 / -1 per trading day; the last day's sign has no following move.
  std::map<std::string, std::vector<int>> day_sign;
  std::vector<TweetRecord> tweets;  // time order
  std::vector<FollowEdge> edges;
  std::vector<EntityRelation> relations;
  std::vector<std::string> positive_words;
  std::vector<std::string> negative_words;
};

std::vector<SyntheticTicker> default_synthetic_tickers();

SyntheticDataset make_synthetic_market(const SyntheticOptions& options);

/// Writes prices/<TICKER>.csv, tweets.jsonl, edges.csv, relations.csv,
/// lexicon/positive.txt and lexicon/negative.txt under `dir`.
void write_synthetic_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace sentitrade
