// Writes the bundled synthetic dataset and a run configuration for it.
#include <iostream>

#include "CLI11.hpp"
#include "sentitrade/io_util.hpp"
#include "sentitrade/synthetic.hpp"

int main(int argc, char** argv) {
  using namespace sentitrade;
  CLI::App app{"Generate the synthetic fixture dataset"};
  std::string dir = "data/fixture";
  SyntheticOptions options;
  app.add_option("--dir", dir, "output directory");
  app.add_option("--seed", options.seed, "generator seed");
  app.add_option("--days", options.trading_days, "trading days")->check(CLI::Range(80, 100000));
  CLI11_PARSE(app, argc, argv);

  try {
    const auto data = make_synthetic_market(options);
    write_synthetic_dataset(data, dir);

    const auto& first = data.bars.begin()->second;
    const auto split = first[first.size() * 3 / 4].date;
    std::string ini;
    ini += "[paths]\nprices_dir = prices\ntweets = tweets.jsonl\nedges = edges.csv\nrelations = relations.csv\n\n";
    ini += "[sentiment]\nprovider = lexicon\npositive = lexicon/positive.txt\nnegative = lexicon/negative.txt\n\n";
    ini += "[agent]\nseed = 7\n\n";
    ini += "[backtest]\ntrain_start = " + first.front().date.iso() + "\ntrain_end = " + split.plus_days(-1).iso() +
           "\ntest_start = " + split.iso() + "\ntest_end = " + first.back().date.iso() + "\n";
    for (const auto& t : data.tickers) {
      std::string keywords;
      for (const auto& k : t.main_extra) keywords += (keywords.empty() ? "" : ", ") + k;
      ini += "\n[ticker:" + t.ticker + "]\nentity = " + t.entity + "\nkeywords = " + keywords + "\n";
    }
    write_text_file(std::filesystem::path{dir} / "config.ini", ini);
    std::cout << "wrote " << data.tweets.size() << " tweets, " << first.size() << " trading days, "
              << data.edges.size() << " edges to " << dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
