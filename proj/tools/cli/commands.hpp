#pragma once

#include <ostream>
#include <stdexcept>
#include <string>

#include "run_config.hpp"

namespace sentitrade::cli {

/// A stage ran before the stage whose output it needs.
class MissingStageOutput : public std::runtime_error {
 public:
  MissingStageOutput(const std::string& what_missing, const std::string& command)
      : std::runtime_error(what_missing + " not found; run `sentitrade " + command + "` first"),
        command_(command) {}
  const std::string& command() const { return command_; }

 private:
  std::string command_;
};

struct RunOptions {
  std::size_t jobs = 1;  // parallel (ticker, agent) jobs in train/backtest
  std::ostream* log = nullptr;
};

/// Stage layout under config.out:
///   ingest/manifest.csv, community/influencers.csv, expand/keywords.txt,
///   signals/signals.csv, <TICKER>/<AGENT>/..., comparison.csv
void cmd_ingest(const RunConfig& config, const RunOptions& options);
void cmd_community(const RunConfig& config, const RunOptions& options);
void cmd_expand(const RunConfig& config, const RunOptions& options);
void cmd_signals(const RunConfig& config, const RunOptions& options);
void cmd_train(const RunConfig& config, const RunOptions& options);
void cmd_backtest(const RunConfig& config, const RunOptions& options);
/// All stages in order.
void cmd_run(const RunConfig& config, const RunOptions& options);

}  // namespace sentitrade::cli
