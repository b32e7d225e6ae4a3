#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentitrade/backtest.hpp"
#include "sentitrade/sentiment.hpp"
#include "sentitrade/signal_engine.hpp"

namespace sentitrade::cli {

/// Bad or missing configuration. `key()` is "section.name".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct TickerSpec {
  std::string ticker;
  std::string entity;
  std::vector<std::string> keywords;  // extra main keywords
};

enum class CaMode { Both, On, Off };

struct RunConfig {
  std::filesystem::path source;  // config file, empty when built in code

  std::filesystem::path prices_dir;  // <prices_dir>/<TICKER>.csv
  std::filesystem::path tweets;
  std::filesystem::path edges;
  std::filesystem::path relations;
  std::filesystem::path out = "out";

  std::vector<TickerSpec> tickers;

  std::string provider = "lexicon";  // lexicon | prescored | remote
  LexiconSpec lexicon;
  PrescoredSpec prescored;
  RemoteOptions remote;

  std::int64_t influencer_threshold = 100;
  SignalConfig signal;
  EnvConfig env;

  std::vector<rl::AgentKind> kinds = {rl::AgentKind::DQN, rl::AgentKind::DDQN, rl::AgentKind::DDDQN};
  CaMode ca = CaMode::Both;
  rl::AgentConfig agent;  // kind and seed are filled per job
  std::optional<std::uint64_t> seed;

  Date train_start{2015, 1, 1};
  Date train_end{2019, 12, 31};
  Date test_start{2020, 1, 1};
  Date test_end{2020, 12, 31};
  bool long_only = false;

  /// Whole config as INI text with every key at its effective value.
  std::string to_ini() const;
};

/// Parses an INI file. Relative paths are resolved against the file's
/// directory. Unknown sections or keys are errors.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& ini_text, const std::filesystem::path& base_dir);

/// Checks that the input paths the selected stage needs exist.
enum class Needs { Prices, Tweets, Edges, Relations, Sentiment };
void require_paths(const RunConfig& config, std::initializer_list<Needs> needs);

/// The seed; throws ConfigError("agent.seed") when none was given.
std::uint64_t require_seed(const RunConfig& config);

/// Job seed for one (ticker, kind) pair; CA and non-CA runs share it so both
/// start from the same initial network.
std::uint64_t job_seed(std::uint64_t master, const std::string& ticker, rl::AgentKind kind);

const TickerSpec& ticker_spec(const RunConfig& config, const std::string& ticker);

}  // namespace sentitrade::cli
