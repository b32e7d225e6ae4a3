#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "sentitrade/backtest.hpp"
#include "sentitrade/data_ingest.hpp"
#include "sentitrade/io_util.hpp"
#include "sentitrade/knowledge_graph.hpp"
#include "sentitrade/sentiment.hpp"
#include "sentitrade/signal_engine.hpp"
#include "sentitrade/social_graph.hpp"

namespace sentitrade::cli {

namespace fs = std::filesystem;

namespace {

class Log {
 public:
  explicit Log(const RunOptions& o) : out_(o.log) {}
  void line(const std::string& text) const {
    if (!out_) return;
    std::lock_guard lock(mutex_);
    *out_ << text << '\n';
  }

 private:
  std::ostream* out_;
  static inline std::mutex mutex_;
};

fs::path manifest_path(const RunConfig& c) { return c.out / "ingest" / "manifest.csv"; }
fs::path influencers_path(const RunConfig& c) { return c.out / "community" / "influencers.csv"; }
fs::path keywords_path(const RunConfig& c) { return c.out / "expand" / "keywords.txt"; }
fs::path signals_path(const RunConfig& c) { return c.out / "signals" / "signals.csv"; }

void require_output(const fs::path& p, const std::string& command) {
  if (!fs::is_regular_file(p)) throw MissingStageOutput(p.string(), command);
}

void echo_config(const RunConfig& c, const fs::path& dir) { write_text_file(dir / "config.ini", c.to_ini()); }

fs::path prices_file(const RunConfig& c, const std::string& ticker) {
  return c.prices_dir / (ticker + ".csv");
}

std::vector<Date> trading_days(std::span<const MarketBar> bars) {
  std::vector<Date> days;
  days.reserve(bars.size());
  for (const auto& b : bars) days.push_back(b.date);
  return days;
}

std::unique_ptr<SentimentProvider> provider_for(const RunConfig& c) {
  if (c.provider == "lexicon") return make_provider(c.lexicon);
  if (c.provider == "prescored") return make_provider(c.prescored);
  return make_provider(c.remote);
}

struct Job {
  std::string ticker;
  rl::AgentKind kind;
  bool ca;

  std::string label() const { return agent_label(kind, ca); }
  fs::path dir(const RunConfig& c) const { return c.out / ticker / label(); }
};

std::vector<Job> jobs_of(const RunConfig& c) {
  std::vector<Job> jobs;
  for (const auto& t : c.tickers) {
    for (auto kind : c.kinds) {
      if (c.ca != CaMode::On) jobs.push_back({t.ticker, kind, false});
      if (c.ca != CaMode::Off) jobs.push_back({t.ticker, kind, true});
    }
  }
  return jobs;
}

/// Runs fn over every job on up to `workers` threads. The first failure in
/// job order is rethrown after all threads finish.
template <class Fn>
void run_jobs(const std::vector<Job>& jobs, std::size_t workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        fn(jobs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ExperimentConfig experiment_config(const RunConfig& c, const Job& job) {
  ExperimentConfig e;
  e.ticker = job.ticker;
  e.agent = c.agent;
  e.agent.kind = job.kind;
  e.agent.seed = job_seed(require_seed(c), job.ticker, job.kind);
  e.env = c.env;
  e.env.use_sentiment = job.ca;
  e.train_start = c.train_start;
  e.train_end = c.train_end;
  e.test_start = c.test_start;
  e.test_end = c.test_end;
  e.long_only = c.long_only;
  return e;
}

std::map<std::string, std::map<Date, double>> load_signal_maps(const RunConfig& c) {
  require_output(signals_path(c), "signals");
  std::map<std::string, std::map<Date, double>> out;
  for (const auto& s : load_daily_signals(signals_path(c))) out[s.ticker][s.date] = s.sentiment_value;
  for (const auto& t : c.tickers) {
    if (!out.count(t.ticker)) {
      throw MissingStageOutput("signals for " + t.ticker + " in " + signals_path(c).string(), "signals");
    }
  }
  return out;
}

}  // namespace

void cmd_ingest(const RunConfig& c, const RunOptions& o) {
  require_paths(c, {Needs::Prices, Needs::Tweets, Needs::Edges, Needs::Relations, Needs::Sentiment});
  Log log(o);
  std::string manifest = "dataset,path,records,skipped\n";
  auto row = [&](const std::string& name, const fs::path& p, std::size_t n, std::size_t skipped) {
    manifest += csv_escape(name) + "," + csv_escape(p.generic_string()) + "," + std::to_string(n) + "," +
                std::to_string(skipped) + "\n";
  };
  for (const auto& t : c.tickers) {
    const auto bars = load_market_csv(prices_file(c, t.ticker));
    if (bars.empty()) throw InputError(prices_file(c, t.ticker).string() + ": no price rows");
    row("prices:" + t.ticker, prices_file(c, t.ticker), bars.size(), 0);
    log.line("prices " + t.ticker + ": " + std::to_string(bars.size()) + " bars " + bars.front().date.iso() +
             ".." + bars.back().date.iso());
  }
  std::string warnings;
  std::size_t records = 0;
  const auto skipped = for_each_tweet(
      c.tweets, [&](TweetRecord&&) { ++records; }, [&](const std::string& w) { warnings += w + "\n"; });
  row("tweets", c.tweets, records, skipped);
  log.line("tweets: " + std::to_string(records) + " records, " + std::to_string(skipped) + " skipped");
  const auto edges = load_follow_edges(c.edges);
  row("edges", c.edges, edges.size(), 0);
  const auto relations = load_relations_csv(c.relations);
  row("relations", c.relations, relations.size(), 0);
  log.line("edges: " + std::to_string(edges.size()) + ", relations: " + std::to_string(relations.size()));
  if (c.provider == "lexicon") {
    (void)LexiconProvider::from_files(c.lexicon.positive, c.lexicon.negative);
  } else if (c.provider == "prescored") {
    (void)PrescoredProvider::from_file(c.prescored.path);
  }

  const auto dir = c.out / "ingest";
  write_text_file(dir / "warnings.txt", warnings);
  write_text_file(manifest_path(c), manifest);
  echo_config(c, dir);
}

void cmd_community(const RunConfig& c, const RunOptions& o) {
  require_output(manifest_path(c), "ingest");
  require_paths(c, {Needs::Edges});
  const auto edges = load_follow_edges(c.edges);
  const auto graph = CommunityGraph::build(edges);
  const auto scores = influencer_scores(graph);
  const auto top = top_influencers(scores, c.influencer_threshold);
  InfluencerMap top_scores;
  for (const auto& id : top) top_scores.emplace(id, scores.at(id));

  const auto dir = c.out / "community";
  write_influencer_csv(influencers_path(c), scores);
  write_influencer_csv(dir / "top_influencers.csv", top_scores);
  echo_config(c, dir);
  Log(o).line("community: " + std::to_string(scores.size()) + " users, " + std::to_string(top.size()) +
              " with more than " + std::to_string(c.influencer_threshold) + " followers");
}

void cmd_expand(const RunConfig& c, const RunOptions& o) {
  require_output(manifest_path(c), "ingest");
  require_paths(c, {Needs::Relations});
  const auto relations = load_relations_csv(c.relations);
  std::map<std::string, KeywordDictionary> dicts;
  for (const auto& t : c.tickers) {
    const auto own = relations_of(relations, t.entity);
    dicts.emplace(t.ticker, expand_keywords(t.entity, own, t.keywords));
    Log(o).line("expand " + t.ticker + ": " + std::to_string(dicts.at(t.ticker).main.size()) + " main, " +
                std::to_string(dicts.at(t.ticker).related.size()) + " related keywords");
  }
  write_dictionaries(keywords_path(c), dicts);
  echo_config(c, c.out / "expand");
}

void cmd_signals(const RunConfig& c, const RunOptions& o) {
  require_output(influencers_path(c), "community");
  require_output(keywords_path(c), "expand");
  require_paths(c, {Needs::Prices, Needs::Tweets, Needs::Sentiment});
  const auto influencers = load_influencer_csv(influencers_path(c));
  const auto dicts = read_dictionaries(keywords_path(c));
  const auto tweets = load_tweets_jsonl(c.tweets);
  const auto provider = provider_for(c);
  const int in_flight = c.provider == "remote" ? c.remote.max_in_flight : 1;

  std::vector<std::string> tickers;
  for (const auto& t : c.tickers) tickers.push_back(t.ticker);
  std::sort(tickers.begin(), tickers.end());

  std::vector<DailySignal> all;
  std::string stats = "ticker,main_matches,related_matches,unmatched,unscored,outside_calendar\n";
  for (const auto& ticker : tickers) {
    auto it = dicts.find(ticker);
    if (it == dicts.end()) throw MissingStageOutput("keywords for " + ticker + " in " + keywords_path(c).string(), "expand");
    const auto bars = load_market_csv(prices_file(c, ticker));
    const auto days = trading_days(bars);
    auto built = build_daily_signals(ticker, days, tweets.records, it->second, influencers, *provider, c.signal,
                                     in_flight);
    const auto& s = built.stats;
    stats += ticker + "," + std::to_string(s.main_matches) + "," + std::to_string(s.related_matches) + "," +
             std::to_string(s.unmatched) + "," + std::to_string(s.unscored) + "," +
             std::to_string(s.outside_calendar) + "\n";
    Log(o).line("signals " + ticker + ": " + std::to_string(s.main_matches) + " main, " +
                std::to_string(s.related_matches) + " related, " + std::to_string(s.unscored) + " unscored");
    all.insert(all.end(), built.signals.begin(), built.signals.end());
  }
  const auto dir = c.out / "signals";
  store_daily_signals(signals_path(c), all);
  write_text_file(dir / "stats.csv", stats);
  if (auto* remote = dynamic_cast<const RemoteProvider*>(provider.get())) {
    remote->save_cache(dir / "sentiment_cache.csv");
  }
  echo_config(c, dir);
}

void cmd_train(const RunConfig& c, const RunOptions& o) {
  require_seed(c);
  require_paths(c, {Needs::Prices});
  const auto signals = load_signal_maps(c);
  std::map<std::string, std::vector<MarketBar>> bars;
  for (const auto& t : c.tickers) bars.emplace(t.ticker, load_market_csv(prices_file(c, t.ticker)));
  Log log(o);

  run_jobs(jobs_of(c), o.jobs, [&](const Job& job) {
    const auto cfg = experiment_config(c, job);
    const auto windows = prepare_windows(cfg, bars.at(job.ticker), signals.at(job.ticker));
    MarketEnv env(windows.train, cfg.env);
    const auto result = rl::train(cfg.agent, env);

    const auto dir = job.dir(c);
    result.online.save(dir / "checkpoint.txt");
    emit_curves(result.curves, job.ticker + " " + job.label(), dir);
    std::string info = "[agent]\n";
    info += "label = " + job.label() + "\n";
    info += "seed = " + std::to_string(cfg.agent.seed) + "\n";
    info += "final_epsilon = " + format_double(result.final_epsilon) + "\n";
    info += "env_steps = " + std::to_string(result.env_steps) + "\n";
    info += "gradient_steps = " + std::to_string(result.gradient_steps) + "\n";
    write_text_file(dir / "agent.ini", info);
    echo_config(c, dir);
    log.line("train " + job.ticker + " " + job.label() + ": " + std::to_string(result.curves.size()) +
             " epochs, final reward " +
             (result.curves.empty() ? std::string{"-"} : format_double(result.curves.back().total_reward)));
  });
}

void cmd_backtest(const RunConfig& c, const RunOptions& o) {
  require_seed(c);
  require_paths(c, {Needs::Prices});
  const auto signals = load_signal_maps(c);
  std::map<std::string, std::vector<MarketBar>> bars;
  for (const auto& t : c.tickers) bars.emplace(t.ticker, load_market_csv(prices_file(c, t.ticker)));
  const auto jobs = jobs_of(c);
  for (const auto& job : jobs) {
    require_output(job.dir(c) / "checkpoint.txt", "train");
    require_output(job.dir(c) / "curves.csv", "train");
  }
  std::vector<ExperimentReport> reports(jobs.size());
  run_jobs(jobs, o.jobs, [&](const Job& job) {
    const auto cfg = experiment_config(c, job);
    const auto windows = prepare_windows(cfg, bars.at(job.ticker), signals.at(job.ticker));
    const auto model = nn::QModel::load(job.dir(c) / "checkpoint.txt");
    if (model.is_dueling() != (job.kind == rl::AgentKind::DDDQN)) {
      throw InputError((job.dir(c) / "checkpoint.txt").string() + ": network kind does not match " +
                       job.label() + "; rerun `sentitrade train`");
    }
    auto report = make_report(cfg, windows, model, load_curves(job.dir(c) / "curves.csv"));
    emit_evaluation(report, job.dir(c));
    const auto index = static_cast<std::size_t>(&job - jobs.data());
    reports[index] = std::move(report);
  });
  const auto table = compare_agents(reports);
  write_text_file(c.out / "comparison.csv", table.to_csv());
  write_text_file(c.out / "comparison.txt", table.to_text());
  echo_config(c, c.out);
  Log(o).line(table.to_text());
}

void cmd_run(const RunConfig& c, const RunOptions& o) {
  cmd_ingest(c, o);
  cmd_community(c, o);
  cmd_expand(c, o);
  cmd_signals(c, o);
  cmd_train(c, o);
  cmd_backtest(c, o);
}

}  // namespace sentitrade::cli
