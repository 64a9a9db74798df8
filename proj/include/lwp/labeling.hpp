#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lwp/common.hpp"
#include "lwp/subgraph.hpp"

namespace lwp {

/// Edge length used for shortest paths. Weight: the normalized weight itself
/// is the length (smaller weight = shorter). InverseWeight: 1/w, so stronger
/// links are shorter.
enum class DistanceMode { Weight, InverseWeight };

enum class LabelMethod { WeightedWL, Random };

/// Permutation of the subgraph's nodes; position encodes the label.
/// order[0] and order[1] are always the two targets.
struct NodeOrdering {
  std::vector<int> order;  // original node ids
  LabelMethod method = LabelMethod::WeightedWL;

  int position_of(int node) const {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == node) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

// Local-index adjacency of the subgraph's known edges (the masked target edge
// is absent from sg.edges, so it never participates in paths or signatures).
inline std::vector<std::vector<std::pair<int, double>>> local_adjacency(const EnclosingSubgraph& sg) {
  std::map<int, int> index;
  for (std::size_t i = 0; i < sg.nodes.size(); ++i) index[sg.nodes[i]] = static_cast<int>(i);
  std::vector<std::vector<std::pair<int, double>>> adj(sg.nodes.size());
  for (const Edge& e : sg.edges) {
    const int a = index.at(e.u);
    const int b = index.at(e.v);
    adj[static_cast<std::size_t>(a)].emplace_back(b, e.w);
    adj[static_cast<std::size_t>(b)].emplace_back(a, e.w);
  }
  return adj;
}

inline double edge_length(double w, DistanceMode mode) {
  return mode == DistanceMode::Weight ? w : 1.0 / w;
}

// Dijkstra from a local index; +inf marks unreachable nodes.
inline std::vector<double> dijkstra_local(const std::vector<std::vector<std::pair<int, double>>>& adj,
                                          int src, DistanceMode mode) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = adj.size();
  std::vector<double> dist(n, inf);
  std::vector<bool> done(n, false);
  dist[static_cast<std::size_t>(src)] = 0.0;
  for (std::size_t round = 0; round < n; ++round) {
    int best = -1;
    double best_d = inf;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && dist[i] < best_d) {
        best = static_cast<int>(i);
        best_d = dist[i];
      }
    if (best < 0) break;
    done[static_cast<std::size_t>(best)] = true;
    for (const auto& [nbr, w] : adj[static_cast<std::size_t>(best)]) {
      const double cand = best_d + edge_length(w, mode);
      if (cand < dist[static_cast<std::size_t>(nbr)]) dist[static_cast<std::size_t>(nbr)] = cand;
    }
  }
  return dist;
}

}  // namespace detail

/// Single-source shortest-path lengths inside the subgraph, aligned with
/// sg.nodes. Edge lengths follow `mode`; unreachable nodes get +inf. The
/// masked target edge takes no part in any path.
inline std::vector<double> weighted_shortest_paths(const EnclosingSubgraph& sg, int src,
                                                   DistanceMode mode = DistanceMode::Weight) {
  const int local = sg.position_of(src);
  if (local < 0) throw std::out_of_range("source node not in subgraph");
  return detail::dijkstra_local(detail::local_adjacency(sg), local, mode);
}

/// Weighted Weisfeiler-Lehman node ordering.
///
/// Targets take positions 0 and 1 with labels fixed at 0. Every other node is
/// seeded with a rank label of its summed shortest-path distance to the two
/// targets (distinct finite sums -> ranks 1,2,...; unreachable nodes share the
/// next rank). Then, repeatedly: each unordered node forms a signature (own
/// label, then neighbor labels ascending); the lexicographically smallest
/// signature is appended to the order and that node's label becomes its
/// 1-based position. Signature ties break by smaller distance sum, then by
/// position in sg.nodes, which makes the procedure fully deterministic (and
/// non-canonical under isomorphism only in those tie cases).
inline NodeOrdering order_nodes_wwl(const EnclosingSubgraph& sg,
                                    DistanceMode mode = DistanceMode::Weight) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = sg.nodes.size();
  const auto adj = detail::local_adjacency(sg);
  const auto d1 = detail::dijkstra_local(adj, 0, mode);
  const auto d2 = detail::dijkstra_local(adj, 1, mode);

  std::vector<double> dsum(n, inf);
  for (std::size_t i = 0; i < n; ++i) dsum[i] = d1[i] + d2[i];

  // Rank-encode the initial labels over non-target nodes.
  std::vector<double> finite;
  for (std::size_t i = 2; i < n; ++i)
    if (dsum[i] < inf) finite.push_back(dsum[i]);
  std::sort(finite.begin(), finite.end());
  finite.erase(std::unique(finite.begin(), finite.end()), finite.end());

  std::vector<int> label(n, 0);
  for (std::size_t i = 2; i < n; ++i) {
    if (dsum[i] < inf) {
      const auto rank = std::lower_bound(finite.begin(), finite.end(), dsum[i]) - finite.begin();
      label[i] = static_cast<int>(rank) + 1;
    } else {
      label[i] = static_cast<int>(finite.size()) + 1;
    }
  }

  std::vector<bool> ordered(n, false);
  ordered[0] = ordered[1] = true;
  std::vector<int> order_local = {0, 1};

  while (order_local.size() < n) {
    int winner = -1;
    std::vector<int> best_sig;
    for (std::size_t i = 2; i < n; ++i) {
      if (ordered[i]) continue;
      std::vector<int> sig;
      sig.reserve(adj[i].size() + 1);
      sig.push_back(label[i]);
      std::vector<int> nbr_labels;
      nbr_labels.reserve(adj[i].size());
      for (const auto& [nbr, w] : adj[i]) nbr_labels.push_back(label[static_cast<std::size_t>(nbr)]);
      std::sort(nbr_labels.begin(), nbr_labels.end());
      sig.insert(sig.end(), nbr_labels.begin(), nbr_labels.end());

      if (winner < 0 || sig < best_sig ||
          (sig == best_sig && dsum[i] < dsum[static_cast<std::size_t>(winner)])) {
        winner = static_cast<int>(i);
        best_sig = std::move(sig);
      }
    }
    ordered[static_cast<std::size_t>(winner)] = true;
    order_local.push_back(winner);
    label[static_cast<std::size_t>(winner)] = static_cast<int>(order_local.size());
  }

  NodeOrdering out;
  out.method = LabelMethod::WeightedWL;
  out.order.reserve(n);
  for (int i : order_local) out.order.push_back(sg.nodes[static_cast<std::size_t>(i)]);
  return out;
}

/// Ablation ordering: targets first, the rest uniformly shuffled by seed.
inline NodeOrdering order_nodes_random(const EnclosingSubgraph& sg, std::uint64_t seed) {
  NodeOrdering out;
  out.method = LabelMethod::Random;
  out.order = sg.nodes;
  if (out.order.size() > 3) {
    std::vector<int> rest(out.order.begin() + 2, out.order.end());
    seeded_shuffle(rest, seed);
    std::copy(rest.begin(), rest.end(), out.order.begin() + 2);
  }
  return out;
}

/// Fixed-size symmetric adjacency-derived feature matrix. Row/column order is
/// the node ordering; entry (i,j) is the known normalized weight or 0; the
/// target entry (0,1)/(1,0) is masked to -1; rows past n_real are zero padding.
struct OrderedFeatureMatrix {
  Eigen::MatrixXd m;
  int n_real = 0;
};

inline OrderedFeatureMatrix build_feature_matrix(const EnclosingSubgraph& sg,
                                                 const NodeOrdering& ord, int max_nodes = 10) {
  if (ord.order.size() != sg.nodes.size())
    throw std::invalid_argument("ordering size does not match subgraph");
  if (static_cast<int>(sg.nodes.size()) > max_nodes)
    throw std::invalid_argument("subgraph larger than max_nodes");
  {
    std::vector<int> a = ord.order, b = sg.nodes;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw std::invalid_argument("ordering is not a permutation of the subgraph nodes");
  }
  std::map<int, int> pos;
  for (std::size_t i = 0; i < ord.order.size(); ++i) pos[ord.order[i]] = static_cast<int>(i);

  OrderedFeatureMatrix fm;
  fm.n_real = static_cast<int>(sg.nodes.size());
  fm.m = Eigen::MatrixXd::Zero(max_nodes, max_nodes);
  for (const Edge& e : sg.edges) {
    const int i = pos.at(e.u);
    const int j = pos.at(e.v);
    fm.m(i, j) = e.w;
    fm.m(j, i) = e.w;
  }
  fm.m(0, 1) = -1.0;
  fm.m(1, 0) = -1.0;
  return fm;
}

/// Debug dump: original node id -> ordering position.
inline nlohmann::json ordering_json(const NodeOrdering& ord) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < ord.order.size(); ++i)
    j[std::to_string(ord.order[i])] = i;
  return j;
}

}  // namespace lwp
