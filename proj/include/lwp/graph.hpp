#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lwp/common.hpp"

namespace lwp {

/// Undirected weighted edge, stored canonically with u < v.
struct Edge {
  int u = 0;
  int v = 0;
  double w = 0.0;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.u == b.u && a.v == b.v && a.w == b.w;
  }
};

inline std::pair<int, int> canonical_pair(int u, int v) {
  return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
}

/// How repeated (u,v) lines / opposite-direction lines are merged at parse time.
enum class DupPolicy { Last, Max, Sum };

/// Immutable undirected graph with strictly positive edge weights.
/// Node ids are dense 0..n-1; the original file tokens are kept in names().
class WeightedGraph {
public:
  WeightedGraph() = default;

  /// Builds from canonicalized edges. `names` maps dense id -> original token;
  /// when empty, tokens default to the decimal ids.
  static WeightedGraph from_edges(int node_count, std::vector<Edge> edges,
                                  std::vector<std::string> names = {}) {
    WeightedGraph g;
    g.n_ = node_count;
    if (node_count < 0) throw std::invalid_argument("negative node count");
    for (auto& e : edges) {
      if (e.u == e.v) throw std::invalid_argument("self-loop in edge set");
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u < 0 || e.v >= node_count) throw std::out_of_range("edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
        throw std::invalid_argument("duplicate edge in edge set");
    }
    g.edges_ = std::move(edges);
    if (names.empty()) {
      g.names_.reserve(static_cast<std::size_t>(node_count));
      for (int i = 0; i < node_count; ++i) g.names_.push_back(std::to_string(i));
    } else {
      if (static_cast<int>(names.size()) != node_count)
        throw std::invalid_argument("name table size mismatch");
      g.names_ = std::move(names);
    }
    g.adj_.assign(static_cast<std::size_t>(node_count), {});
    for (const Edge& e : g.edges_) {
      g.adj_[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
      g.adj_[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
    }
    for (auto& nbrs : g.adj_) std::sort(nbrs.begin(), nbrs.end());
    return g;
  }

  int node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool has_node(int u) const noexcept { return u >= 0 && u < n_; }

  /// Sorted (neighbor, weight) list of u.
  const std::vector<std::pair<int, double>>& neighbors(int u) const {
    if (!has_node(u)) throw std::out_of_range("node id " + std::to_string(u) + " not in graph");
    return adj_[static_cast<std::size_t>(u)];
  }

  int degree(int u) const { return static_cast<int>(neighbors(u).size()); }

  bool has_edge(int u, int v) const {
    if (!has_node(u) || !has_node(v)) return false;
    const auto& nbrs = adj_[static_cast<std::size_t>(u)];
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                               [](const std::pair<int, double>& p, int key) { return p.first < key; });
    return it != nbrs.end() && it->first == v;
  }

  double weight(int u, int v) const {
    const auto& nbrs = neighbors(u);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                               [](const std::pair<int, double>& p, int key) { return p.first < key; });
    if (it == nbrs.end() || it->first != v)
      throw std::out_of_range("edge (" + std::to_string(u) + "," + std::to_string(v) + ") not in graph");
    return it->second;
  }

  /// Sum of weights incident to u.
  double strength(int u) const {
    double s = 0.0;
    for (const auto& [nbr, w] : neighbors(u)) s += w;
    return s;
  }

private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<std::string> names_;
};

/// Parses whitespace-separated "u v w" lines. `#`-prefixed lines are comments,
/// blank lines are skipped, fields beyond the third are ignored, self-loop
/// lines are dropped. Node tokens may be arbitrary strings and are renumbered
/// densely in first-appearance order.
inline WeightedGraph parse_edge_list(std::istream& in, DupPolicy policy = DupPolicy::Max) {
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> names;
  std::map<std::pair<int, int>, double> merged;
  std::string line;
  std::size_t line_no = 0;

  auto intern = [&](const std::string& token) {
    auto [it, inserted] = ids.emplace(token, static_cast<int>(names.size()));
    if (inserted) names.push_back(token);
    return it->second;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tu, tv, tw;
    if (!(fields >> tu)) continue;  // blank
    if (tu[0] == '#') continue;
    if (!(fields >> tv >> tw))
      throw parse_error(line_no, "expected at least 3 fields: u v w");
    double w = 0.0;
    std::size_t consumed = 0;
    try {
      w = std::stod(tw, &consumed);
    } catch (const std::exception&) {
      throw parse_error(line_no, "non-numeric weight '" + tw + "'");
    }
    if (consumed != tw.size()) throw parse_error(line_no, "non-numeric weight '" + tw + "'");
    if (!(w > 0.0))
      throw std::domain_error("line " + std::to_string(line_no) + ": non-positive weight " + tw);
    const int u = intern(tu);
    const int v = intern(tv);
    if (u == v) continue;
    const auto key = canonical_pair(u, v);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, w);
    } else {
      switch (policy) {
        case DupPolicy::Last: it->second = w; break;
        case DupPolicy::Max: it->second = std::max(it->second, w); break;
        case DupPolicy::Sum: it->second += w; break;
      }
    }
  }

  std::vector<Edge> edges;
  edges.reserve(merged.size());
  for (const auto& [key, w] : merged) edges.push_back({key.first, key.second, w});
  const int node_count = static_cast<int>(names.size());
  return WeightedGraph::from_edges(node_count, std::move(edges), std::move(names));
}

inline WeightedGraph parse_edge_list_file(const std::string& path, DupPolicy policy = DupPolicy::Max) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_edge_list(in, policy);
}

/// Writes "u v w" lines using the original node tokens; parse(write(g)) == g.
inline void write_edge_list(const WeightedGraph& g, std::ostream& out) {
  out.precision(17);
  for (const Edge& e : g.edges())
    out << g.names()[static_cast<std::size_t>(e.u)] << ' '
        << g.names()[static_cast<std::size_t>(e.v)] << ' ' << e.w << '\n';
}

/// Dense id -> original token map, for persisting alongside reports.
inline nlohmann::json id_map_json(const WeightedGraph& g) {
  nlohmann::json m = nlohmann::json::object();
  for (int i = 0; i < g.node_count(); ++i)
    m[std::to_string(i)] = g.names()[static_cast<std::size_t>(i)];
  return m;
}

/// Exponential weight normalization w* = exp(-1/w), mapping (0,inf) into (0,1)
/// monotonically. Requires all weights strictly positive.
inline WeightedGraph normalize_weights(const WeightedGraph& g) {
  std::vector<Edge> edges = g.edges();
  for (Edge& e : edges) {
    if (!(e.w > 0.0))
      throw std::domain_error("normalize_weights: non-positive weight on edge (" +
                              std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    e.w = std::exp(-1.0 / e.w);
  }
  return WeightedGraph::from_edges(g.node_count(), std::move(edges), g.names());
}

struct SplitSpec {
  double train_ratio = 0.9;
  std::uint64_t seed = 0;
  int repeats = 10;
};

struct WeightSplit {
  std::vector<Edge> train_edges;
  std::vector<Edge> test_edges;
};

/// Seeded uniform partition of the edge set. Train size is
/// llround(train_ratio * |E|); both sides must end up non-empty.
inline WeightSplit split_train_test(const WeightedGraph& g, const SplitSpec& spec) {
  const std::size_t m = g.edge_count();
  if (!(spec.train_ratio > 0.0 && spec.train_ratio < 1.0))
    throw std::invalid_argument("train_ratio must be in (0,1)");
  const auto k = static_cast<std::size_t>(std::llround(spec.train_ratio * static_cast<double>(m)));
  if (k < 1 || m - k < 1)
    throw std::invalid_argument("degenerate split: |E|=" + std::to_string(m) + " train_ratio=" +
                                std::to_string(spec.train_ratio));
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  seeded_shuffle(idx, spec.seed);

  WeightSplit split;
  split.train_edges.reserve(k);
  split.test_edges.reserve(m - k);
  for (std::size_t i = 0; i < m; ++i)
    (i < k ? split.train_edges : split.test_edges).push_back(g.edges()[idx[i]]);
  auto by_pair = [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); };
  std::sort(split.train_edges.begin(), split.train_edges.end(), by_pair);
  std::sort(split.test_edges.begin(), split.test_edges.end(), by_pair);
  return split;
}

}  // namespace lwp
