#pragma once

#include <map>
#include <set>
#include <vector>

#include "stcast/types.hpp"

namespace stcast {

/// Undirected region adjacency. Symmetric, no self-loops. Nodes may be
/// isolated (a region with no neighbors is legal).
class AdjacencyGraph {
 public:
  void add_node(const RegionId& r) { adj_.try_emplace(r); }

  /// Adds an undirected edge; duplicates collapse. Throws on self-loops.
  void add_edge(const RegionId& a, const RegionId& b) {
    if (a == b) {
      throw ValidationError("adjacency: self-loop on region '" + a + "'");
    }
    adj_[a].insert(b);
    adj_[b].insert(a);
  }

  bool has_node(const RegionId& r) const { return adj_.contains(r); }

  std::vector<RegionId> nodes() const {
    std::vector<RegionId> out;
    out.reserve(adj_.size());
    for (const auto& [r, _] : adj_) out.push_back(r);
    return out;  // sorted: map is ordered by id
  }

  /// Neighbor ids in ascending id order; empty for isolated/unknown nodes.
  std::vector<RegionId> neighbors(const RegionId& r) const {
    auto it = adj_.find(r);
    if (it == adj_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

  /// Edges as (a, b) pairs with a < b, sorted.
  std::vector<std::pair<RegionId, RegionId>> edges() const {
    std::vector<std::pair<RegionId, RegionId>> out;
    for (const auto& [a, nbrs] : adj_) {
      for (const auto& b : nbrs) {
        if (a < b) out.emplace_back(a, b);
      }
    }
    return out;
  }

  std::size_t node_count() const { return adj_.size(); }

 private:
  std::map<RegionId, std::set<RegionId>> adj_;
};

}  // namespace stcast
