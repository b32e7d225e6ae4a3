#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sentitrade/data_ingest.hpp"
#include "sentitrade/market_env.hpp"
#include "sentitrade/neural_net.hpp"
#include "sentitrade/rl_agents.hpp"

namespace sentitrade {

enum class Position { Flat, Long, Short };
std::string_view to_string(Position p);

struct TradeEntry {
  Date date;
  Action action = Action::Hold;
  double price = 0.0;      // normalized price the action executed at
  bool effective = false;  // false for Buy-while-long / Sell-while-short
  Position position_after = Position::Flat;
};

/// One-unit position book. Buy/Sell move flat<->long and flat<->short;
/// repeating the side already held is recorded as a no-op. Holds are not
/// recorded.
class TradeLedger {
 public:
  explicit TradeLedger(bool long_only = false) : long_only_(long_only) {}

  void apply(Date date, Action action, double price);

  const std::vector<TradeEntry>& entries() const { return entries_; }
  Position position() const { return position_; }
  double entry_price() const { return entry_price_; }
  double realized() const { return realized_; }
  /// Number of effective position changes.
  std::size_t trade_count() const;

 private:
  bool long_only_;
  std::vector<TradeEntry> entries_;
  Position position_ = Position::Flat;
  double entry_price_ = 0.0;
  double realized_ = 0.0;
};

/// Realized round trips plus the open position marked at `final_price`.
double profit(const TradeLedger& ledger, double final_price);

struct OverlayRow {
  Date date;
  double close_norm = 0.0;
  Action action = Action::Hold;
  Position position_after = Position::Flat;
};

struct Evaluation {
  TradeLedger ledger;
  std::vector<OverlayRow> overlay;
  double final_price = 0.0;
  double profit = 0.0;
};

using Policy = std::function<Action(const StateVector& state, std::size_t day)>;

/// One pass over the tradable days of `env`, executing `policy` at each
/// day's normalized close.
Evaluation evaluate_policy(MarketEnv& env, const Policy& policy, bool long_only = false);

/// Greedy (epsilon 0) evaluation of a trained network.
Evaluation evaluate(const nn::QModel& model, MarketEnv& env, bool long_only = false);

/// Mean profit of `count` uniformly random policies.
double random_policy_mean_profit(MarketEnv& env, std::size_t count, std::uint64_t seed,
                                 bool long_only = false);

struct ExperimentConfig {
  std::string ticker;
  rl::AgentConfig agent;
  EnvConfig env;  // env.use_sentiment is the community-aware flag
  Date train_start{2015, 1, 1};
  Date train_end{2019, 12, 31};
  Date test_start{2020, 1, 1};
  Date test_end{2020, 12, 31};
  bool long_only = false;
};

/// "DQN", "CA-DQN", ...
std::string agent_label(rl::AgentKind kind, bool community_aware);

struct ExperimentWindows {
  PriceScaler scaler{0.0, 1.0};
  MarketWindow train;
  MarketWindow test;
};

/// Scaler fitted on the training closes only and reused for the test window;
/// the test window borrows `warmup_days` earlier bars as history. Throws
/// std::invalid_argument if either window is too short.
ExperimentWindows prepare_windows(const ExperimentConfig& config, std::span<const MarketBar> bars,
                                  const std::map<Date, double>& sentiment);

struct ExperimentReport {
  rl::AgentKind kind = rl::AgentKind::DQN;
  bool community_aware = false;
  std::string ticker;
  Date train_first, train_last;
  Date test_first, test_last;  // tradable test days
  double profit = 0.0;
  std::vector<rl::EpochStats> curves;
  std::size_t trade_count = 0;
  Evaluation evaluation;

  std::string label() const { return agent_label(kind, community_aware); }
};

struct ExperimentOutcome {
  ExperimentReport report;
  rl::TrainResult training;
};

/// Train on the training window, evaluate greedily on the test window.
ExperimentOutcome run_experiment(const ExperimentConfig& config, std::span<const MarketBar> bars,
                                 const std::map<Date, double>& sentiment);

/// Builds the report for an already-trained network.
ExperimentReport make_report(const ExperimentConfig& config, const ExperimentWindows& windows,
                             const nn::QModel& model, std::vector<rl::EpochStats> curves);

/// Canonical column order: DQN, CA-DQN, DDQN, CA-DDQN, DDDQN, CA-DDDQN.
struct ComparisonTable {
  std::vector<std::string> columns;
  struct Row {
    std::string ticker;
    std::vector<std::optional<double>> profits;  // per column
    std::optional<std::size_t> best;             // column index
  };
  std::vector<Row> rows;  // sorted by ticker

  std::string to_csv() const;
  /// Aligned text table; the best entry of each row is marked with '*'.
  std::string to_text() const;
};

/// Pure function of the reports: independent of their order. Throws
/// std::invalid_argument on two reports for the same (ticker, agent).
ComparisonTable compare_agents(std::span<const ExperimentReport> reports);

/// reward.csv, loss.csv, curves.csv and their SVG line plots.
void emit_curves(std::span<const rl::EpochStats> curves, const std::string& title,
                 const std::filesystem::path& dir);
/// trades.csv, overlay.csv, overlay.svg, report.txt.
void emit_evaluation(const ExperimentReport& report, const std::filesystem::path& dir);

std::vector<rl::EpochStats> load_curves(const std::filesystem::path& curves_csv);

}  // namespace sentitrade
