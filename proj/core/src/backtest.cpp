#include "sentitrade/backtest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <tuple>

#include "sentitrade/io_util.hpp"
#include "sentitrade/plot.hpp"

namespace sentitrade {

std::string_view to_string(Position p) {
  switch (p) {
    case Position::Flat: return "flat";
    case Position::Long: return "long";
    case Position::Short: return "short";
  }
  return "?";
}

// ------------------------------------------------------------ ledger

void TradeLedger::apply(Date date, Action action, double price) {
  if (action == Action::Hold) return;
  TradeEntry e{date, action, price, false, position_};
  if (action == Action::Buy) {
    if (position_ == Position::Flat) {
      position_ = Position::Long;
      entry_price_ = price;
      e.effective = true;
    } else if (position_ == Position::Short) {
      realized_ += entry_price_ - price;
      position_ = Position::Flat;
      e.effective = true;
    }
  } else {
    if (position_ == Position::Flat && !long_only_) {
      position_ = Position::Short;
      entry_price_ = price;
      e.effective = true;
    } else if (position_ == Position::Long) {
      realized_ += price - entry_price_;
      position_ = Position::Flat;
      e.effective = true;
    }
  }
  e.position_after = position_;
  entries_.push_back(e);
}

std::size_t TradeLedger::trade_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const TradeEntry& e) { return e.effective; }));
}

double profit(const TradeLedger& ledger, double final_price) {
  double total = ledger.realized();
  if (ledger.position() == Position::Long) total += final_price - ledger.entry_price();
  if (ledger.position() == Position::Short) total += ledger.entry_price() - final_price;
  return total;
}

// -------------------------------------------------------- evaluation

Evaluation evaluate_policy(MarketEnv& env, const Policy& policy, bool long_only) {
  Evaluation ev{TradeLedger{long_only}, {}, 0.0, 0.0};
  const auto& w = env.window();
  StateVector state = env.reset();
  bool done = false;
  while (!done) {
    const std::size_t t = env.cursor();
    const Action a = policy(state, t);
    ev.ledger.apply(w.dates[t], a, w.close_norm[t]);
    ev.overlay.push_back({w.dates[t], w.close_norm[t], a, ev.ledger.position()});
    const Step step = env.step(a);
    state = step.next_state;
    done = step.done;
  }
  ev.final_price = w.close_norm.back();
  ev.profit = profit(ev.ledger, ev.final_price);
  return ev;
}

Evaluation evaluate(const nn::QModel& model, MarketEnv& env, bool long_only) {
  return evaluate_policy(
      env,
      [&](const StateVector& s, std::size_t) { return action_at(rl::greedy_index(model.forward(s))); },
      long_only);
}

double random_policy_mean_profit(MarketEnv& env, std::size_t count, std::uint64_t seed,
                                 bool long_only) {
  if (count == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    total += evaluate_policy(env, [&](const StateVector&, std::size_t) { return action_at(pick(rng)); },
                             long_only)
                 .profit;
  }
  return total / static_cast<double>(count);
}

// ------------------------------------------------------- experiments

std::string agent_label(rl::AgentKind kind, bool community_aware) {
  return (community_aware ? "CA-" : "") + std::string{rl::to_string(kind)};
}

ExperimentWindows prepare_windows(const ExperimentConfig& config, std::span<const MarketBar> bars,
                                  const std::map<Date, double>& sentiment) {
  std::vector<double> train_closes;
  for (const auto& b : bars) {
    if (b.date >= config.train_start && b.date <= config.train_end) train_closes.push_back(b.close);
  }
  if (train_closes.empty()) {
    throw std::invalid_argument(config.ticker + ": no price bars in the training window " +
                                config.train_start.iso() + ".." + config.train_end.iso());
  }
  ExperimentWindows w;
  w.scaler = PriceScaler::fit(train_closes);
  w.train = build_window(bars, w.scaler, sentiment, config.train_start, config.train_end, 0);
  w.test = build_window(bars, w.scaler, sentiment, config.test_start, config.test_end,
                        config.env.warmup_days);
  const auto need = config.env.warmup_days + 2;
  if (w.train.size() < need) {
    throw std::invalid_argument(config.ticker + ": training window has " + std::to_string(w.train.size()) +
                                " trading days; needs " + std::to_string(need));
  }
  if (w.test.size() < need) {
    throw std::invalid_argument(config.ticker + ": test window (with warmup history) has " +
                                std::to_string(w.test.size()) + " trading days; needs " +
                                std::to_string(need));
  }
  return w;
}

ExperimentReport make_report(const ExperimentConfig& config, const ExperimentWindows& windows,
                             const nn::QModel& model, std::vector<rl::EpochStats> curves) {
  ExperimentReport r;
  r.kind = config.agent.kind;
  r.community_aware = config.env.use_sentiment;
  r.ticker = config.ticker;
  const auto warm = config.env.warmup_days;
  r.train_first = windows.train.dates[warm];
  r.train_last = windows.train.dates[windows.train.size() - 2];
  r.test_first = windows.test.dates[warm];
  r.test_last = windows.test.dates[windows.test.size() - 2];
  r.curves = std::move(curves);

  MarketEnv test_env(windows.test, config.env);
  r.evaluation = evaluate(model, test_env, config.long_only);
  r.profit = r.evaluation.profit;
  r.trade_count = r.evaluation.ledger.trade_count();
  return r;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, std::span<const MarketBar> bars,
                                 const std::map<Date, double>& sentiment) {
  const auto windows = prepare_windows(config, bars, sentiment);
  MarketEnv train_env(windows.train, config.env);
  ExperimentOutcome out;
  out.training = rl::train(config.agent, train_env);
  out.report = make_report(config, windows, out.training.online, out.training.curves);
  return out;
}

// -------------------------------------------------------- comparison

namespace {

const std::array<std::string, 6>& canonical_columns() {
  static const std::array<std::string, 6> cols = {"DQN", "CA-DQN", "DDQN", "CA-DDQN", "DDDQN", "CA-DDDQN"};
  return cols;
}

std::string fixed2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

}  // namespace

ComparisonTable compare_agents(std::span<const ExperimentReport> reports) {
  std::set<std::string> labels;
  std::map<std::string, std::map<std::string, double>> by_ticker;
  for (const auto& r : reports) {
    const auto label = r.label();
    labels.insert(label);
    if (!by_ticker[r.ticker].emplace(label, r.profit).second) {
      throw std::invalid_argument("duplicate report for " + r.ticker + " / " + label);
    }
  }
  ComparisonTable table;
  for (const auto& c : canonical_columns()) {
    if (labels.count(c)) table.columns.push_back(c);
  }
  for (const auto& [ticker, profits] : by_ticker) {
    ComparisonTable::Row row;
    row.ticker = ticker;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      auto it = profits.find(table.columns[c]);
      if (it == profits.end()) {
        row.profits.emplace_back();
        continue;
      }
      row.profits.emplace_back(it->second);
      if (!row.best || it->second > *row.profits[*row.best]) row.best = c;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::string s = "ticker";
  for (const auto& c : columns) s += "," + c;
  s += ",best\n";
  for (const auto& row : rows) {
    s += csv_escape(row.ticker);
    for (const auto& p : row.profits) s += "," + (p ? format_double(*p) : std::string{});
    s += "," + (row.best ? columns[*row.best] : std::string{}) + "\n";
  }
  return s;
}

std::string ComparisonTable::to_text() const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"DATASET"});
  for (const auto& c : columns) cells.back().push_back(c);
  for (const auto& row : rows) {
    std::vector<std::string> line{row.ticker};
    for (std::size_t c = 0; c < row.profits.size(); ++c) {
      std::string v = row.profits[c] ? fixed2(*row.profits[c]) : "-";
      if (row.best && *row.best == c) v += "*";
      line.push_back(v);
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(columns.size() + 1, 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::string s;
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) s += "  ";
      s += line[c];
      if (c + 1 < line.size()) s.append(width[c] - line[c].size(), ' ');
    }
    s += "\n";
  }
  s += "(* = best profit in row; profit in normalized price points)\n";
  return s;
}

// ------------------------------------------------------------ output

void emit_curves(std::span<const rl::EpochStats> curves, const std::string& title,
                 const std::filesystem::path& dir) {
  std::string reward = "epoch,total_reward\n";
  std::string loss = "epoch,mean_loss\n";
  std::string both = "epoch,total_reward,mean_loss\n";
  plot::Chart rc{title + " reward", "epoch", "total reward", {}, {}, {}};
  plot::Chart lc{title + " loss", "epoch", "mean loss", {}, {}, {}};
  for (const auto& e : curves) {
    const auto ep = std::to_string(e.epoch);
    reward += ep + "," + format_double(e.total_reward) + "\n";
    loss += ep + "," + format_double(e.mean_loss) + "\n";
    both += ep + "," + format_double(e.total_reward) + "," + format_double(e.mean_loss) + "\n";
    rc.x.push_back(static_cast<double>(e.epoch));
    rc.y.push_back(e.total_reward);
    lc.x.push_back(static_cast<double>(e.epoch));
    lc.y.push_back(e.mean_loss);
  }
  write_text_file(dir / "reward.csv", reward);
  write_text_file(dir / "loss.csv", loss);
  write_text_file(dir / "curves.csv", both);
  write_text_file(dir / "reward.svg", plot::render_svg(rc));
  write_text_file(dir / "loss.svg", plot::render_svg(lc));
}

void emit_evaluation(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::string trades = "date,action,price_norm,effective,position\n";
  for (const auto& e : report.evaluation.ledger.entries()) {
    trades += e.date.iso() + "," + std::string{to_string(e.action)} + "," + format_double(e.price) +
              "," + (e.effective ? "1" : "0") + "," + std::string{to_string(e.position_after)} + "\n";
  }
  write_text_file(dir / "trades.csv", trades);

  std::string overlay = "date,close_norm,action,position\n";
  plot::Chart chart{report.ticker + " " + report.label() + " test window: price and actions",
                    "trading day", "normalized close", {}, {}, {}};
  for (std::size_t i = 0; i < report.evaluation.overlay.size(); ++i) {
    const auto& o = report.evaluation.overlay[i];
    overlay += o.date.iso() + "," + format_double(o.close_norm) + "," + std::string{to_string(o.action)} +
               "," + std::string{to_string(o.position_after)} + "\n";
    chart.x.push_back(static_cast<double>(i));
    chart.y.push_back(o.close_norm);
    if (o.action != Action::Hold) {
      chart.markers.push_back({static_cast<double>(i), o.close_norm,
                               o.action == Action::Buy ? "green" : "red"});
    }
  }
  write_text_file(dir / "overlay.csv", overlay);
  write_text_file(dir / "overlay.svg", plot::render_svg(chart));

  std::string txt;
  txt += "agent: " + report.label() + "\n";
  txt += "ticker: " + report.ticker + "\n";
  if (!report.evaluation.overlay.empty()) {
    txt += "train_window: " + report.train_first.iso() + ".." + report.train_last.iso() + "\n";
    txt += "test_window: " + report.test_first.iso() + ".." + report.test_last.iso() + "\n";
  }
  txt += "profit: " + format_double(report.profit) + "\n";
  txt += "trades: " + std::to_string(report.trade_count) + "\n";
  txt += "epochs: " + std::to_string(report.curves.size()) + "\n";
  if (!report.curves.empty()) {
    txt += "final_total_reward: " + format_double(report.curves.back().total_reward) + "\n";
    txt += "final_mean_loss: " + format_double(report.curves.back().mean_loss) + "\n";
  }
  write_text_file(dir / "report.txt", txt);
}

std::vector<rl::EpochStats> load_curves(const std::filesystem::path& curves_csv) {
  const auto lines = read_lines(curves_csv);
  std::vector<rl::EpochStats> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = split_csv_line(lines[i]);
    long long epoch = 0;
    rl::EpochStats e;
    if (f.size() != 3 || !parse_int64(f[0], epoch) || !parse_double(f[1], e.total_reward) ||
        !parse_double(f[2], e.mean_loss)) {
      throw InputError(curves_csv.string() + ":" + std::to_string(i + 1) +
                       ": expected epoch,total_reward,mean_loss");
    }
    e.epoch = static_cast<std::size_t>(epoch);
    out.push_back(e);
  }
  return out;
}

}  // namespace sentitrade
