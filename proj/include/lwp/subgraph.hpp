#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "lwp/common.hpp"
#include "lwp/graph.hpp"

namespace lwp {

/// Induced weighted subgraph around a target node pair. The targets sit at
/// nodes[0] and nodes[1]; `edges` holds the induced edges whose weights are
/// known, so the target pair itself never appears there. Its (hidden) presence
/// is recorded in unknown_mask instead, which keeps the true target weight
/// unreachable from this type.
struct EnclosingSubgraph {
  std::vector<int> nodes;                        // original ids, targets first
  std::vector<Edge> edges;                       // induced known-weight edges
  std::pair<int, int> target{0, 0};              // (v1, v2) as requested
  std::vector<std::pair<int, int>> unknown_mask; // hidden-weight pairs, canonical

  int position_of(int node) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == node) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

// Hop distances (unweighted BFS) from src, capped at `limit`; -1 = beyond cap.
inline std::vector<int> hop_distances(const WeightedGraph& g, int src, int limit) {
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()), -1);
  dist[static_cast<std::size_t>(src)] = 0;
  std::queue<int> frontier;
  frontier.push(src);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    const int du = dist[static_cast<std::size_t>(u)];
    if (du == limit) continue;
    for (const auto& [v, w] : g.neighbors(u)) {
      auto& dv = dist[static_cast<std::size_t>(v)];
      if (dv < 0) {
        dv = du + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// Nodes within `hop` hops of either target, the targets always retained.
/// When the candidate pool exceeds max_nodes-2, a seeded uniform sample keeps
/// the subgraph at max_nodes nodes; smaller pools are kept whole. Induced
/// edges carry the weights of `g`; the target edge is masked structurally.
inline EnclosingSubgraph extract_enclosing_subgraph(const WeightedGraph& g, int v1, int v2,
                                                    int hop = 1, int max_nodes = 10,
                                                    std::uint64_t seed = 0) {
  if (v1 == v2) throw std::invalid_argument("target nodes must differ");
  if (!g.has_node(v1) || !g.has_node(v2))
    throw std::out_of_range("target node not in graph");
  if (hop < 1) throw std::invalid_argument("hop must be >= 1");
  if (max_nodes < 2) throw std::invalid_argument("max_nodes must be >= 2");

  std::vector<int> candidates;
  if (hop == 1) {
    std::set<int> pool;
    for (const auto& [nbr, w] : g.neighbors(v1)) pool.insert(nbr);
    for (const auto& [nbr, w] : g.neighbors(v2)) pool.insert(nbr);
    pool.erase(v1);
    pool.erase(v2);
    candidates.assign(pool.begin(), pool.end());
  } else {
    const auto d1 = detail::hop_distances(g, v1, hop);
    const auto d2 = detail::hop_distances(g, v2, hop);
    for (int u = 0; u < g.node_count(); ++u) {
      if (u == v1 || u == v2) continue;
      if (d1[static_cast<std::size_t>(u)] >= 0 || d2[static_cast<std::size_t>(u)] >= 0)
        candidates.push_back(u);
    }
  }

  const std::size_t budget = static_cast<std::size_t>(max_nodes) - 2;
  if (candidates.size() > budget) {
    seeded_shuffle(candidates, seed);
    candidates.resize(budget);
    std::sort(candidates.begin(), candidates.end());
  }

  EnclosingSubgraph sg;
  sg.target = {v1, v2};
  sg.unknown_mask = {canonical_pair(v1, v2)};
  sg.nodes.reserve(candidates.size() + 2);
  sg.nodes.push_back(v1);
  sg.nodes.push_back(v2);
  sg.nodes.insert(sg.nodes.end(), candidates.begin(), candidates.end());

  std::set<int> members(sg.nodes.begin(), sg.nodes.end());
  const auto masked = canonical_pair(v1, v2);
  for (int u : sg.nodes) {
    for (const auto& [nbr, w] : g.neighbors(u)) {
      if (u >= nbr || !members.count(nbr)) continue;
      if (std::make_pair(u, nbr) == masked) continue;
      sg.edges.push_back({u, nbr, w});
    }
  }
  std::sort(sg.edges.begin(), sg.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return sg;
}

}  // namespace lwp
