#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentitrade/data_ingest.hpp"

namespace sentitrade {

/// user_id -> influencer score (in-community follower count).
using InfluencerMap = std::map<std::string, std::int64_t>;

/// Directed follower graph (follower -> followee) of one community.
/// Immutable after construction; nodes are kept in sorted order.
class CommunityGraph {
 public:
  CommunityGraph() = default;

  /// Deduplicates edges and collects endpoints. Throws std::invalid_argument
  /// on a self-loop.
  static CommunityGraph build(std::span<const FollowEdge> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  /// Sorted (follower index, followee index) pairs.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }

 private:
  std::vector<std::string> nodes_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

/// IS(u) = in-degree of u; every node appears, including zero scores.
InfluencerMap influencer_scores(const CommunityGraph& graph);

/// Users with IS strictly greater than `threshold`.
std::set<std::string> top_influencers(const InfluencerMap& scores, std::int64_t threshold = 100);

/// Emits `user_id,score` sorted by user id.
void write_influencer_csv(const std::filesystem::path& path, const InfluencerMap& scores);
InfluencerMap load_influencer_csv(const std::filesystem::path& path);

}  // namespace sentitrade
