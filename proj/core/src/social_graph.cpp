#include "sentitrade/social_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace sentitrade {

CommunityGraph CommunityGraph::build(std::span<const FollowEdge> edges) {
  CommunityGraph g;
  for (const auto& e : edges) {
    if (e.follower == e.followee) {
      throw std::invalid_argument("self-loop edge for user '" + e.follower + "'");
    }
    g.nodes_.push_back(e.follower);
    g.nodes_.push_back(e.followee);
  }
  std::sort(g.nodes_.begin(), g.nodes_.end());
  g.nodes_.erase(std::unique(g.nodes_.begin(), g.nodes_.end()), g.nodes_.end());

  auto index_of = [&](const std::string& id) {
    return static_cast<std::uint32_t>(
        std::lower_bound(g.nodes_.begin(), g.nodes_.end(), id) - g.nodes_.begin());
  };
  g.edges_.reserve(edges.size());
  for (const auto& e : edges) g.edges_.emplace_back(index_of(e.follower), index_of(e.followee));
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
  return g;
}

InfluencerMap influencer_scores(const CommunityGraph& graph) {
  std::vector<std::int64_t> in_degree(graph.node_count(), 0);
  for (const auto& [from, to] : graph.edges()) ++in_degree[to];
  InfluencerMap scores;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    scores.emplace_hint(scores.end(), graph.nodes()[i], in_degree[i]);
  }
  return scores;
}

std::set<std::string> top_influencers(const InfluencerMap& scores, std::int64_t threshold) {
  if (threshold < 0) throw std::invalid_argument("influencer threshold must be >= 0");
  std::set<std::string> out;
  for (const auto& [user, score] : scores) {
    if (score > threshold) out.insert(out.end(), user);
  }
  return out;
}

void write_influencer_csv(const std::filesystem::path& path, const InfluencerMap& scores) {
  std::string out = "user_id,score\n";
  for (const auto& [user, score] : scores) {
    out += csv_escape(user);
    out += ',';
    out += std::to_string(score);
    out += '\n';
  }
  write_text_file(path, out);
}

InfluencerMap load_influencer_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  InfluencerMap scores;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = split_csv_line(lines[i]);
    long long score = 0;
    if (f.size() != 2 || !parse_int64(f[1], score) || score < 0) {
      throw InputError(path.string() + ":" + std::to_string(i + 1) + ": expected user_id,score");
    }
    scores[f[0]] = score;
  }
  return scores;
}

}  // namespace sentitrade
