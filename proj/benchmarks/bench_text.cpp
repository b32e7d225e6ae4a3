#include <benchmark/benchmark.h>

#include "sentitrade/knowledge_graph.hpp"
#include "sentitrade/synthetic.hpp"
#include "sentitrade/text.hpp"

using namespace sentitrade;

namespace {

const std::string kTweet =
    "Bugün #GARAN hisseleri yükselişte, Garanti Bankası ve BBVA ortaklığı hakkında yeni açıklama geldi! "
    "İstanbul borsası genel olarak olumlu.";

void BM_Fold(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(fold_text(kTweet));
}
BENCHMARK(BM_Fold);

void BM_MatchTweets(benchmark::State& state) {
  SyntheticOptions o;
  o.trading_days = 60;
  const auto data = make_synthetic_market(o);
  const auto& t = data.tickers.front();
  const auto dict = expand_keywords(t.entity, t.relations, t.main_extra);
  std::size_t matched = 0;
  for (auto _ : state) {
    for (const auto& tw : data.tweets) matched += match_tweet(tw.text, dict) != MatchKind::None;
  }
  benchmark::DoNotOptimize(matched);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.tweets.size()));
}
BENCHMARK(BM_MatchTweets);

}  // namespace
