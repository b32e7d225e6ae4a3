#include "run_config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sentitrade/io_util.hpp"

namespace sentitrade::cli {

namespace {

namespace pt = boost::property_tree;

struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&)> parse;
  std::function<std::string()> emit;
};

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ", ") + i;
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  if (!parse_double(trim(v), d)) throw ConfigError(key, "expected a number, got '" + v + "'");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  long long n = 0;
  if (!parse_int64(trim(v), n)) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return n;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const auto n = to_int(key, v);
  if (n < 0) throw ConfigError(key, "must not be negative");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto s = to_lower_ascii(trim(v));
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

Date to_date(const std::string& key, const std::string& v) {
  const auto d = parse_date(trim(v));
  if (!d) throw ConfigError(key, "expected a YYYY-MM-DD date, got '" + v + "'");
  return *d;
}

std::string path_text(const std::filesystem::path& p) { return p.generic_string(); }

std::vector<Field> fields(RunConfig& c, const std::filesystem::path& base) {
  auto path_field = [&](std::string section, std::string key, std::filesystem::path& target) {
    return Field{std::move(section), std::move(key),
                 [&target, base](const std::string& v) {
                   const std::filesystem::path p{std::string{trim(v)}};
                   target = p.empty() || p.is_absolute() ? p : (base / p).lexically_normal();
                 },
                 [&target] { return path_text(target); }};
  };
  auto num = [](std::string section, std::string key, double& target) {
    const auto full = section + "." + key;
    return Field{std::move(section), std::move(key),
                 [&target, full](const std::string& v) { target = to_double(full, v); },
                 [&target] { return format_double(target); }};
  };
  auto count = [](std::string section, std::string key, std::size_t& target) {
    const auto full = section + "." + key;
    return Field{std::move(section), std::move(key),
                 [&target, full](const std::string& v) { target = to_size(full, v); },
                 [&target] { return std::to_string(target); }};
  };
  auto date = [](std::string section, std::string key, Date& target) {
    const auto full = section + "." + key;
    return Field{std::move(section), std::move(key),
                 [&target, full](const std::string& v) { target = to_date(full, v); },
                 [&target] { return target.iso(); }};
  };

  return {
      path_field("paths", "prices_dir", c.prices_dir),
      path_field("paths", "tweets", c.tweets),
      path_field("paths", "edges", c.edges),
      path_field("paths", "relations", c.relations),
      path_field("paths", "out", c.out),

      {"sentiment", "provider",
       [&c](const std::string& v) {
         const auto p = to_lower_ascii(trim(v));
         if (p != "lexicon" && p != "prescored" && p != "remote") {
           throw ConfigError("sentiment.provider", "expected lexicon, prescored or remote, got '" + v + "'");
         }
         c.provider = p;
       },
       [&c] { return c.provider; }},
      path_field("sentiment", "positive", c.lexicon.positive),
      path_field("sentiment", "negative", c.lexicon.negative),
      path_field("sentiment", "prescored", c.prescored.path),
      {"sentiment", "endpoint", [&c](const std::string& v) { c.remote.endpoint = std::string{trim(v)}; },
       [&c] { return c.remote.endpoint; }},
      {"sentiment", "timeout_ms",
       [&c](const std::string& v) {
         c.remote.timeout = std::chrono::milliseconds{to_size("sentiment.timeout_ms", v)};
       },
       [&c] { return std::to_string(c.remote.timeout.count()); }},
      {"sentiment", "max_attempts",
       [&c](const std::string& v) {
         c.remote.max_attempts = static_cast<int>(to_size("sentiment.max_attempts", v));
         if (c.remote.max_attempts < 1) throw ConfigError("sentiment.max_attempts", "must be at least 1");
       },
       [&c] { return std::to_string(c.remote.max_attempts); }},
      {"sentiment", "backoff_ms",
       [&c](const std::string& v) {
         c.remote.backoff = std::chrono::milliseconds{to_size("sentiment.backoff_ms", v)};
       },
       [&c] { return std::to_string(c.remote.backoff.count()); }},
      {"sentiment", "max_in_flight",
       [&c](const std::string& v) {
         c.remote.max_in_flight = static_cast<int>(to_size("sentiment.max_in_flight", v));
         if (c.remote.max_in_flight < 1) throw ConfigError("sentiment.max_in_flight", "must be at least 1");
       },
       [&c] { return std::to_string(c.remote.max_in_flight); }},

      {"community", "threshold",
       [&c](const std::string& v) {
         c.influencer_threshold = to_int("community.threshold", v);
         if (c.influencer_threshold < 0) throw ConfigError("community.threshold", "must not be negative");
       },
       [&c] { return std::to_string(c.influencer_threshold); }},

      num("signal", "rc_oe", c.signal.rc_oe),
      num("signal", "rp", c.signal.rp),
      {"signal", "retweet_bias_mode",
       [&c](const std::string& v) {
         const auto m = parse_retweet_bias_mode(trim(v));
         if (!m) throw ConfigError("signal.retweet_bias_mode", "expected additive or multiplicative, got '" + v + "'");
         c.signal.retweet_bias_mode = *m;
       },
       [&c] { return std::string{to_string(c.signal.retweet_bias_mode)}; }},
      {"signal", "utc_offset_minutes",
       [&c](const std::string& v) {
         const auto n = to_int("signal.utc_offset_minutes", v);
         if (n < -24 * 60 || n > 24 * 60) throw ConfigError("signal.utc_offset_minutes", "out of range");
         c.signal.utc_offset_minutes = static_cast<int>(n);
       },
       [&c] { return std::to_string(c.signal.utc_offset_minutes); }},

      num("env", "w_daily", c.env.weights.w_daily),
      num("env", "w_5", c.env.weights.w_5),
      num("env", "w_30", c.env.weights.w_30),
      num("env", "alpha_price", c.env.weights.alpha_price),
      count("env", "warmup_days", c.env.warmup_days),

      {"agent", "kinds",
       [&c](const std::string& v) {
         c.kinds.clear();
         for (const auto& item : split_list(v)) {
           const auto k = rl::parse_agent_kind(item);
           if (!k) throw ConfigError("agent.kinds", "unknown agent kind '" + item + "'");
           if (std::find(c.kinds.begin(), c.kinds.end(), *k) == c.kinds.end()) c.kinds.push_back(*k);
         }
         if (c.kinds.empty()) throw ConfigError("agent.kinds", "needs at least one agent kind");
       },
       [&c] {
         std::vector<std::string> names;
         for (auto k : c.kinds) names.emplace_back(rl::to_string(k));
         return join(names);
       }},
      {"agent", "community_aware",
       [&c](const std::string& v) {
         const auto s = to_lower_ascii(trim(v));
         if (s == "both") {
           c.ca = CaMode::Both;
         } else {
           c.ca = to_bool("agent.community_aware", s) ? CaMode::On : CaMode::Off;
         }
       },
       [&c] { return std::string{c.ca == CaMode::Both ? "both" : c.ca == CaMode::On ? "true" : "false"}; }},
      num("agent", "gamma", c.agent.gamma),
      num("agent", "epsilon_start", c.agent.epsilon_start),
      num("agent", "epsilon_end", c.agent.epsilon_end),
      count("agent", "batch_size", c.agent.batch_size),
      count("agent", "target_sync_every", c.agent.target_sync_every),
      count("agent", "epochs", c.agent.epochs),
      count("agent", "replay_capacity", c.agent.replay_capacity),
      count("agent", "max_total_steps", c.agent.max_total_steps),
      num("agent", "learning_rate", c.agent.adam.learning_rate),
      num("agent", "beta1", c.agent.adam.beta1),
      num("agent", "beta2", c.agent.adam.beta2),
      num("agent", "adam_epsilon", c.agent.adam.epsilon),
      {"agent", "seed",
       [&c](const std::string& v) {
         const auto s = std::string{trim(v)};
         if (s.empty()) {
           c.seed.reset();
           return;
         }
         c.seed = static_cast<std::uint64_t>(to_size("agent.seed", s));
       },
       [&c] { return c.seed ? std::to_string(*c.seed) : std::string{}; }},

      date("backtest", "train_start", c.train_start),
      date("backtest", "train_end", c.train_end),
      date("backtest", "test_start", c.test_start),
      date("backtest", "test_end", c.test_end),
      {"backtest", "long_only", [&c](const std::string& v) { c.long_only = to_bool("backtest.long_only", v); },
       [&c] { return std::string{c.long_only ? "true" : "false"}; }},
  };
}

void validate(const RunConfig& c) {
  auto wrap = [](const std::string& section, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      // Core validators start their message with the field name.
      const std::string what = e.what();
      throw ConfigError(section + "." + what.substr(0, what.find(' ')), what);
    }
  };
  wrap("signal", [&] { c.signal.validate(); });
  wrap("env", [&] { c.env.validate(); });
  wrap("agent", [&] { c.agent.validate(); });
  if (c.tickers.empty()) throw ConfigError("ticker", "no [ticker:<SYMBOL>] section in the config");
  if (c.train_end < c.train_start) throw ConfigError("backtest.train_end", "is before backtest.train_start");
  if (c.test_end < c.test_start) throw ConfigError("backtest.test_end", "is before backtest.test_start");
  if (c.test_start <= c.train_end) throw ConfigError("backtest.test_start", "must be after backtest.train_end");
}

}  // namespace

std::string RunConfig::to_ini() const {
  RunConfig copy = *this;
  std::string out;
  std::string section;
  for (const auto& f : fields(copy, {})) {
    if (f.section != section) {
      out += (section.empty() ? "" : "\n") + ("[" + f.section + "]\n");
      section = f.section;
    }
    out += f.key + " = " + f.emit() + "\n";
  }
  for (const auto& t : tickers) {
    out += "\n[ticker:" + t.ticker + "]\nentity = " + t.entity + "\nkeywords = " + join(t.keywords) + "\n";
  }
  return out;
}

RunConfig parse_run_config(const std::string& ini_text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig c;
  auto table = fields(c, base_dir);
  std::set<std::string> seen_tickers;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError(section, "key outside any [section]");
    if (section.rfind("ticker:", 0) == 0) {
      TickerSpec t;
      t.ticker = std::string{trim(std::string_view{section}.substr(7))};
      if (t.ticker.empty()) throw ConfigError(section, "ticker symbol is empty");
      if (!seen_tickers.insert(t.ticker).second) throw ConfigError(section, "duplicate ticker section");
      for (const auto& [key, value] : body) {
        if (key == "entity") {
          t.entity = std::string{trim(value.data())};
        } else if (key == "keywords") {
          t.keywords = split_list(value.data());
        } else {
          throw ConfigError(section + "." + key, "unknown key");
        }
      }
      if (t.entity.empty()) throw ConfigError(section + ".entity", "missing entity name");
      c.tickers.push_back(std::move(t));
      continue;
    }
    bool known_section = false;
    for (const auto& f : table) known_section = known_section || f.section == section;
    if (!known_section) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : body) {
      auto it = std::find_if(table.begin(), table.end(),
                             [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == table.end()) throw ConfigError(section + "." + key, "unknown key");
      it->parse(value.data());
    }
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  const auto abs = std::filesystem::absolute(path);
  RunConfig c = parse_run_config(text.str(), abs.parent_path());
  c.source = abs;
  return c;
}

void require_paths(const RunConfig& c, std::initializer_list<Needs> needs) {
  auto check = [](const std::string& key, const std::filesystem::path& p, bool dir) {
    if (p.empty()) throw ConfigError(key, "not set");
    if (dir ? !std::filesystem::is_directory(p) : !std::filesystem::is_regular_file(p)) {
      throw ConfigError(key, "path does not exist: " + p.string());
    }
  };
  for (auto n : needs) {
    switch (n) {
      case Needs::Prices:
        check("paths.prices_dir", c.prices_dir, true);
        for (const auto& t : c.tickers) {
          check("paths.prices_dir", c.prices_dir / (t.ticker + ".csv"), false);
        }
        break;
      case Needs::Tweets: check("paths.tweets", c.tweets, false); break;
      case Needs::Edges: check("paths.edges", c.edges, false); break;
      case Needs::Relations: check("paths.relations", c.relations, false); break;
      case Needs::Sentiment:
        if (c.provider == "lexicon") {
          check("sentiment.positive", c.lexicon.positive, false);
          check("sentiment.negative", c.lexicon.negative, false);
        } else if (c.provider == "prescored") {
          check("sentiment.prescored", c.prescored.path, false);
        } else if (c.remote.endpoint.empty()) {
          throw ConfigError("sentiment.endpoint", "not set");
        }
        break;
    }
  }
}

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw ConfigError("agent.seed", "a seed is required (set agent.seed or pass --seed)");
  return *c.seed;
}

std::uint64_t job_seed(std::uint64_t master, const std::string& ticker, rl::AgentKind kind) {
  // FNV-1a over the job identity, then a splitmix64 finalizer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  mix(ticker);
  mix(rl::to_string(kind));
  std::uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const TickerSpec& ticker_spec(const RunConfig& c, const std::string& ticker) {
  for (const auto& t : c.tickers) {
    if (t.ticker == ticker) return t;
  }
  throw ConfigError("ticker", "'" + ticker + "' has no [ticker:" + ticker + "] section");
}

}  // namespace sentitrade::cli
