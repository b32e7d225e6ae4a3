#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "sentitrade/io_util.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace sentitrade;
  using namespace sentitrade::cli;

  CLI::App app{"Sentiment-aware deep Q-learning trading pipeline"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> tickers;
  std::vector<std::string> agents;
  bool ca = false;
  bool no_ca = false;
  std::size_t jobs = 1;
  bool quiet = false;

  app.add_option("--config", config_path, "INI run configuration")->required();
  app.add_option("--seed", seed, "master seed (overrides agent.seed)");
  app.add_option("--out", out, "output directory (overrides paths.out)");
  app.add_option("--ticker", tickers, "restrict to this ticker; repeatable")->take_all();
  app.add_option("--agent", agents, "agent kind DQN, DDQN or DDDQN; repeatable")->take_all();
  auto* ca_flag = app.add_flag("--ca", ca, "community-aware agents only");
  app.add_flag("--no-ca", no_ca, "sentiment-zeroed agents only")->excludes(ca_flag);
  app.add_option("--jobs", jobs, "parallel training/backtest jobs")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "no progress output");

  struct Sub {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&, const RunOptions&);
  };
  const Sub subs[] = {
      {"ingest", "validate prices, tweets, follower edges and relations", cmd_ingest},
      {"community", "follower graph and influencer scores", cmd_community},
      {"expand", "keyword dictionaries from the entity relations", cmd_expand},
      {"signals", "daily sentiment signal table", cmd_signals},
      {"train", "train every selected agent; writes checkpoints and curves", cmd_train},
      {"backtest", "evaluate checkpoints on the test window; comparison table", cmd_backtest},
      {"run", "all stages in order", cmd_run},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    RunConfig config = load_run_config(config_path);
    if (seed) config.seed = *seed;
    if (!out.empty()) config.out = std::filesystem::absolute(out).lexically_normal();
    if (!tickers.empty()) {
      std::vector<TickerSpec> selected;
      for (const auto& t : tickers) {
        const auto& spec = ticker_spec(config, t);
        if (std::none_of(selected.begin(), selected.end(), [&](const TickerSpec& s) { return s.ticker == t; })) {
          selected.push_back(spec);
        }
      }
      config.tickers = std::move(selected);
    }
    if (!agents.empty()) {
      config.kinds.clear();
      for (const auto& a : agents) {
        const auto k = rl::parse_agent_kind(a);
        if (!k) throw ConfigError("--agent", "unknown agent kind '" + a + "' (expected DQN, DDQN or DDDQN)");
        if (std::find(config.kinds.begin(), config.kinds.end(), *k) == config.kinds.end()) {
          config.kinds.push_back(*k);
        }
      }
    }
    if (ca) config.ca = CaMode::On;
    if (no_ca) config.ca = CaMode::Off;

    RunOptions options;
    options.jobs = jobs;
    options.log = quiet ? nullptr : &std::cerr;
    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) s.fn(config, options);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const MissingStageOutput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
