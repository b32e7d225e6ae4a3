// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <iostream>
#include <set>
#include <sys/wait.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "fixture_pipeline.hpp"
#include "run_config.hpp"
#include "sentitrade/backtest.hpp"
#include "sentitrade/io_util.hpp"
#include "sentitrade/market_env.hpp"
#include "sentitrade/neural_net.hpp"
#include "sentitrade/rl_agents.hpp"
#include "tabular_mdp.hpp"
#include "test_support.hpp"

using namespace sentitrade;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = SENTITRADE_FIXTURE_DIR;
const std::string kCli = SENTITRADE_CLI_PATH;

struct Verdict {
  bool pass = true;
  std::string detail;
};

void require(Verdict& v, bool ok, const std::string& what) {
  if (!ok && v.pass) {
    v.pass = false;
    v.detail = what;
  }
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (auto& x : v) x = support::uniform(rng, -scale, scale);
  return v;
}

nn::Mlp random_mlp(std::mt19937_64& rng, std::vector<std::size_t> widths) {
  nn::Mlp m(widths, nn::Activation::ReLU, nn::Activation::Identity);
  m.init_he_uniform(rng);
  for (std::size_t k = 0; k < m.layers().size(); ++k) {
    for (auto& b : m.biases(k)) b = support::uniform(rng, -0.1, 0.1);
  }
  return m;
}

std::size_t width(std::mt19937_64& rng) { return 1 + support::uniform_index(rng, 16); }

// ------------------------------------------------------------------ 1
Verdict formulas() {
  Verdict v;
  require(v, retweet_bias(2.0, 5) == 7.0, "additive RB");
  require(v, retweet_bias(2.0, 5, RetweetBiasMode::Multiplicative) == 10.0, "multiplicative RB");
  require(v, interaction_bias(7.0, 3, 2) == 12.0, "IB");
  const double main = effect_score(12.0, 8.0, MatchKind::Main);
  const double related = effect_score(12.0, 8.0, MatchKind::Related);
  require(v, main == 20.0, "main ES");
  require(v, related == 5.0 && main / related == 4.0, "related ES ratio");
  require(v, signed_score(5.0, Polarity::Positive) == 5.0, "positive polarity");
  require(v, signed_score(5.0, Polarity::Negative) == -5.0, "negative polarity");
  require(v, signed_score(5.0, Polarity::Neutral) == 0.0, "neutral polarity");
  const auto n = normalize_day(std::vector<double>{3, 4});
  require(v, near(n[0], 0.6) && near(n[1], 0.8), "L2 day normalization");
  const double day[] = {3, -4};
  require(v, near(daily_sentiment("T", Date{2020, 1, 2}, day).sentiment_value, -0.2), "daily sum");
  const auto p = normalize_prices(std::vector<double>{10, 15, 20});
  require(v, p[0] == 0.0 && p[1] == 50.0 && p[2] == 100.0, "price endpoints");
  const auto flat = normalize_prices(std::vector<double>{7, 7});
  require(v, flat[0] == 50.0 && flat[1] == 50.0, "constant series");
  v.detail = v.pass ? "RB, IB, ES (rp=4), polarity, L2, 0-100 scaling exact" : v.detail;
  return v;
}

// ------------------------------------------------------------------ 2
Verdict gradients() {
  Verdict v;
  std::mt19937_64 rng(2);
  double worst = 0;
  std::size_t kinks = 0;
  for (int i = 0; i < 100; ++i) {
    const bool dueling = i % 2 == 1;
    nn::QModel q = dueling ? nn::QModel(nn::DuelingNetwork(random_mlp(rng, {6, width(rng), 5}),
                                                           random_mlp(rng, {5, width(rng), 1}),
                                                           random_mlp(rng, {5, width(rng), 3})))
                           : nn::QModel(random_mlp(rng, {6, width(rng), width(rng), 3}));
    if (i >= 96) {
      // a few at the production shape
      q = dueling ? nn::QModel(nn::make_dueling_q_network(rng)) : nn::QModel(nn::make_q_network(rng));
    }
    const auto x = random_vec(rng, 6, 3);
    const auto r = nn::gradient_check(q, x, support::uniform_index(rng, 3), support::uniform(rng, -5, 5));
    worst = std::max(worst, r.max_relative_error);
    kinks += r.skipped_at_kink;
  }
  require(v, worst < 1e-4, "max relative error " + sci(worst));
  if (v.pass) v.detail = "max relative error " + sci(worst) + ", " + std::to_string(kinks) + " kink skips";
  return v;
}

// ------------------------------------------------------------------ 3
Verdict dueling_identity() {
  Verdict v;
  std::mt19937_64 rng(3);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto net = i % 10 == 0 ? nn::make_dueling_q_network(rng)
                                 : nn::DuelingNetwork(random_mlp(rng, {6, width(rng), 5}),
                                                      random_mlp(rng, {5, width(rng), 1}),
                                                      random_mlp(rng, {5, width(rng), 3}));
    const auto x = random_vec(rng, 6, 50);
    const auto q = net.forward(x);
    const double value = net.state_value(x);
    worst = std::max(worst, std::abs(((q[0] - value) + (q[1] - value) + (q[2] - value)) / 3.0));
  }
  require(v, worst <= 1e-9, "max |mean(Q - V)| " + sci(worst));
  if (v.pass) v.detail = "max |mean(Q - V)| = " + sci(worst);
  return v;
}

// ------------------------------------------------------------------ 4
Verdict double_q() {
  Verdict v;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const bool small = i % 4 != 0;
    const nn::QModel online = small ? nn::QModel(random_mlp(rng, {6, width(rng), 3}))
                                    : nn::QModel(nn::make_q_network(rng));
    const nn::QModel target = small ? nn::QModel(random_mlp(rng, {6, width(rng), 3}))
                                    : nn::QModel(nn::make_q_network(rng));
    rl::Transition t;
    for (auto& x : t.next_state) x = support::uniform(rng, -10, 10);
    t.reward = support::uniform(rng, -5, 5);
    const double gamma = support::uniform(rng, 0, 0.999);
    const double plain = rl::dqn_target(t, target, gamma);
    require(v, rl::ddqn_target(t, online, target, gamma) <= plain, "ddqn exceeded dqn at case " + std::to_string(i));
    require(v, rl::ddqn_target(t, target, target, gamma) == plain, "inequality with online == target");
  }
  if (v.pass) v.detail = "1000 cases; equal when online == target";
  return v;
}

// ------------------------------------------------------------------ 5
Verdict tabular() {
  Verdict v;
  const auto qstar = support::value_iteration(0.9);
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    rl::AgentConfig c;
    c.gamma = 0.9;
    c.epochs = 1000000;
    c.max_total_steps = 5000;
    c.seed = seed;
    support::LineMdp env(seed + 100);
    const auto r = rl::train(c, env);
    bool optimal = r.env_steps <= 5000;
    for (std::size_t s = 0; s < support::LineMdp::kStates; ++s) {
      optimal = optimal && rl::greedy_index(r.online.forward(support::LineMdp::encode(s))) ==
                               rl::greedy_index(qstar[s]);
    }
    solved += optimal;
  }
  require(v, solved >= 4, std::to_string(solved) + "/5 seeds optimal");
  if (v.pass) v.detail = std::to_string(solved) + "/5 seeds reach the value-iteration policy";
  return v;
}

// ------------------------------------------------------------------ 6
Verdict signal_usefulness() {
  Verdict v;
  const auto config = cli::load_run_config(kFixture / "config.ini");
  const auto& spec = config.tickers.front();
  const auto market = support::load_fixture_market(kFixture, spec.ticker, spec.entity, spec.keywords);
  int good = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ExperimentConfig e;
    e.ticker = spec.ticker;
    e.agent.seed = seed;
    e.agent.epochs = 50;
    e.train_start = config.train_start;
    e.train_end = config.train_end;
    e.test_start = config.test_start;
    e.test_end = config.test_end;
    e.env.use_sentiment = true;
    const double ca = run_experiment(e, market.bars, market.sentiment).report.profit;
    const auto windows = prepare_windows(e, market.bars, market.sentiment);
    MarketEnv test_env(windows.test, e.env);
    const double random_mean = random_policy_mean_profit(test_env, 100, 1000 + seed);
    e.env.use_sentiment = false;
    const double plain = run_experiment(e, market.bars, market.sentiment).report.profit;
    const bool ok = ca > 0 && ca > random_mean && ca > plain;
    good += ok;
    char buf[96];
    std::snprintf(buf, sizeof buf, " [%d: %.1f/%.1f/%.1f%s]", static_cast<int>(seed), ca, random_mean, plain,
                  ok ? "" : " x");
    per_seed += buf;
  }
  require(v, good >= 8, std::to_string(good) + "/10 seeds;" + per_seed);
  if (v.pass) v.detail = std::to_string(good) + "/10 seeds (CA/random/non-CA):" + per_seed;
  return v;
}

// ------------------------------------------------------------------ 7
Verdict replay_buffer() {
  Verdict v;
  rl::ReplayBuffer b;
  for (int i = 0; i < 1500; ++i) {
    rl::Transition t;
    t.reward = i;
    b.push(t);
  }
  require(v, b.size() == 1000, "size after overflow");
  for (std::size_t i = 0; i < b.size(); ++i) require(v, b.at(i).reward == 500.0 + i, "FIFO order");
  std::mt19937_64 rng(7);
  std::vector<double> counts(1000, 0);
  std::size_t draws = 0;
  while (draws < 100000) {
    for (auto i : b.sample_indices(32, rng)) {
      if (draws == 100000) break;
      ++counts[i];
      ++draws;
    }
  }
  const double expected = 100.0;
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double critical = boost::math::quantile(boost::math::chi_squared(999), 0.99);
  require(v, chi2 < critical, "chi-square " + std::to_string(chi2) + " >= " + std::to_string(critical));
  if (v.pass) v.detail = "FIFO exact; chi-square " + std::to_string(chi2) + " < " + std::to_string(critical);
  return v;
}

// ------------------------------------------------------------------ 8
std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    // config.ini snapshots record the output directory itself
    if (e.is_regular_file() && e.path().filename() != "config.ini") {
      out[fs::relative(e.path(), root).generic_string()] = support::slurp(e.path());
    }
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  support::TempDir dir;
  const auto f = kFixture.string();
  auto text = support::slurp(kFixture / "config.ini");
  for (const char* rel : {"prices", "tweets.jsonl", "edges.csv", "relations.csv", "lexicon/positive.txt",
                          "lexicon/negative.txt"}) {
    const std::string from = "= " + std::string(rel) + "\n";
    const auto at = text.find(from);
    if (at != std::string::npos) text.replace(at, from.size(), "= " + f + "/" + rel + "\n");
  }
  text.replace(text.find("[agent]\n"), 8, "[agent]\nepochs = 10\n");
  dir.write("config.ini", text);
  std::map<std::string, std::string> runs[2];
  for (int i = 0; i < 2; ++i) {
    const auto out = dir / ("run" + std::to_string(i));
    const std::string cmd = "'" + kCli + "' run --quiet --config '" + (dir / "config.ini").string() + "' --out '" +
                            out.string() + "' > '" + (dir / "log.txt").string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      require(v, false, "pipeline run failed: " + support::slurp(dir / "log.txt"));
      return v;
    }
    runs[i] = artifacts(out);
  }
  std::size_t checkpoints = 0;
  for (const auto& [name, content] : runs[0]) checkpoints += name.ends_with("checkpoint.txt");
  require(v, runs[0].count("signals/signals.csv") && runs[0].count("comparison.csv") && checkpoints == 12,
          "expected artifacts missing");
  require(v, runs[0].size() == runs[1].size(), "artifact sets differ");
  for (const auto& [name, content] : runs[0]) {
    auto it = runs[1].find(name);
    require(v, it != runs[1].end() && it->second == content, "differs: " + name);
  }
  if (v.pass) v.detail = std::to_string(runs[0].size()) + " artifacts byte-identical across two runs";
  return v;
}

// ------------------------------------------------------------------ 9
Verdict graph_identities() {
  Verdict v;
  std::mt19937_64 rng(9);
  for (int g = 0; g < 100; ++g) {
    const std::size_t n = 2 + support::uniform_index(rng, 999);
    const std::size_t m = support::uniform_index(rng, 4 * n);
    std::vector<FollowEdge> edges;
    for (std::size_t e = 0; e < m; ++e) {
      const auto a = support::uniform_index(rng, n), b = support::uniform_index(rng, n);
      if (a != b) edges.push_back({"u" + std::to_string(a), "u" + std::to_string(b)});
    }
    const auto graph = CommunityGraph::build(edges);
    std::int64_t sum = 0;
    for (const auto& [user, score] : influencer_scores(graph)) sum += score;
    require(v, sum == static_cast<std::int64_t>(graph.edge_count()), "in-degree sum on graph " + std::to_string(g));
  }
  std::vector<FollowEdge> star;
  for (int i = 0; i < 101; ++i) star.push_back({"f" + std::to_string(i), "hub101"});
  for (int i = 0; i < 100; ++i) star.push_back({"f" + std::to_string(i), "hub100"});
  const auto scores = influencer_scores(CommunityGraph::build(star));
  require(v, scores.at("hub101") == 101 && scores.at("hub100") == 100, "star scores");
  const auto top = top_influencers(scores);
  require(v, top == std::set<std::string>{"hub101"}, "threshold is strict");
  if (v.pass) v.detail = "100 graphs; 101 followers qualifies, 100 does not";
  return v;
}

// ------------------------------------------------------------------ 10
Verdict environment_algebra() {
  Verdict v;
  std::mt19937_64 rng(10);
  MarketWindow w;
  Date d{2018, 1, 1};
  double c = 80;
  std::vector<double> closes;
  for (int i = 0; i < 500; ++i, d = d.plus_days(1)) {
    c *= 1 + support::uniform(rng, -0.04, 0.04);
    closes.push_back(c);
    w.dates.push_back(d);
    w.sentiment.push_back(support::uniform(rng, -3, 3));
  }
  w.closes = closes;
  w.close_norm = normalize_prices(closes);
  RewardWeights weights;
  for (std::size_t t = 30; t + 1 < w.size(); ++t) {
    const double buy = reward(w, t, Action::Buy, weights);
    require(v, buy == -reward(w, t, Action::Sell, weights), "antisymmetry at day " + std::to_string(t));
    require(v, reward(w, t, Action::Hold, weights) == 0.0, "hold reward at day " + std::to_string(t));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t window = trial % 2 ? 5 : 30;
    std::vector<double> xs(window + 1);
    for (auto& x : xs) x = support::uniform(rng, 1, 100);
    const double k = std::exp(support::uniform(rng, -5, 5));
    std::vector<double> scaled = xs;
    for (auto& x : scaled) x *= k;
    const double a = growth_bias(xs, window), b = growth_bias(scaled, window);
    require(v, std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)), "growth bias scale invariance");
  }
  if (v.pass) v.detail = "469 days antisymmetric, Hold = 0; growth bias invariant under 200 rescalings";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Verdict()> run;
    double time_limit;  // seconds; 0 = none
  };
  const std::vector<Criterion> criteria = {
      {"formula suite", formulas, 1},
      {"gradient correctness", gradients, 30},
      {"dueling identity", dueling_identity, 0},
      {"double-Q dominance", double_q, 0},
      {"tabular oracle", tabular, 60},
      {"signal usefulness", signal_usefulness, 300},
      {"replay buffer contract", replay_buffer, 0},
      {"determinism", determinism, 0},
      {"graph identities", graph_identities, 0},
      {"environment algebra", environment_algebra, 0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (v.pass && criteria[i].time_limit > 0 && secs >= criteria[i].time_limit) {
      v = {false, "over the " + std::to_string(static_cast<int>(criteria[i].time_limit)) + "s budget"};
    }
    failures += !v.pass;
    std::printf("%s %2zu %-24s (%.2fs) %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(), secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
