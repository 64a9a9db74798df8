#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lwp/common.hpp"
#include "lwp/graph.hpp"

namespace lwp {

/// Recipe for a reproducible benchmark-scale weighted graph: preferential
/// attachment with triadic closure for the topology, then weights drawn as a
/// monotone log-affine map of a local-structure score with lognormal noise,
/// spanning exactly [w_min, w_max]. Weights therefore correlate with the
/// 1-hop neighborhood (as in collaboration/contact networks) but are not a
/// deterministic function of it.
struct SynthSpec {
  std::string name = "synth";
  int nodes = 100;
  long long edges = 300;
  double w_min = 1.0;
  double w_max = 10.0;
  bool integer_weights = false;
  double noise_sigma = 0.6;
  double triad_prob = 0.5;
  double shape = 1.0;  // quantile skew: >1 piles weights toward w_min
  std::uint64_t seed = 1;
};

namespace detail {

inline double normal01(std::mt19937_64& rng) {
  // Box-Muller; kept explicit so the stream is stable across standard libraries.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace detail

inline WeightedGraph synth_weighted_graph(const SynthSpec& spec) {
  const int n = spec.nodes;
  const long long m_target = spec.edges;
  if (n < 3) throw std::invalid_argument("synth: need at least 3 nodes");
  if (m_target < n - 1) throw std::invalid_argument("synth: too few edges for connected growth");
  if (m_target > static_cast<long long>(n) * (n - 1) / 2)
    throw std::invalid_argument("synth: more edges than a simple graph admits");
  if (!(spec.w_min > 0.0 && spec.w_max >= spec.w_min))
    throw std::invalid_argument("synth: weight range must be positive");

  std::mt19937_64 rng(mix64(spec.seed));
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  std::vector<int> endpoint_pool;  // each edge contributes both endpoints
  long long m_now = 0;

  auto add_edge = [&](int u, int v) {
    if (u == v || adj[static_cast<std::size_t>(u)].count(v)) return false;
    adj[static_cast<std::size_t>(u)].insert(v);
    adj[static_cast<std::size_t>(v)].insert(u);
    endpoint_pool.push_back(u);
    endpoint_pool.push_back(v);
    ++m_now;
    return true;
  };
  auto preferential_pick = [&]() {
    return endpoint_pool[static_cast<std::size_t>(rng() % endpoint_pool.size())];
  };

  add_edge(0, 1);
  add_edge(1, 2);
  add_edge(0, 2);

  // Grow with a fractional per-node quota so the running edge count tracks
  // the target; the first link attaches preferentially, later ones close
  // triangles with probability triad_prob.
  const double quota = static_cast<double>(m_target - m_now) / static_cast<double>(n - 3);
  double acc = 0.0;
  for (int t = 3; t < n; ++t) {
    acc += quota;
    int links = std::max(1, static_cast<int>(acc));
    acc -= static_cast<double>(links);
    links = std::min(links, t);
    int first = -1;
    int attempts = 0;
    while (links > 0 && attempts < 200) {
      ++attempts;
      int target;
      if (first < 0 || uniform01(rng) >= spec.triad_prob) {
        target = preferential_pick();
      } else {
        const auto& nbrs = adj[static_cast<std::size_t>(first)];
        auto it = nbrs.begin();
        std::advance(it, static_cast<long>(rng() % nbrs.size()));
        target = *it;
      }
      if (add_edge(t, target)) {
        if (first < 0) first = target;
        --links;
      }
    }
    if (first < 0) {
      // degenerate fallback: force attachment to keep every node non-isolated
      for (int u = 0; u < t && first < 0; ++u)
        if (add_edge(t, u)) first = u;
    }
  }

  while (m_now < m_target) {
    add_edge(preferential_pick(), preferential_pick());
  }
  while (m_now > m_target) {
    const std::size_t u = rng() % static_cast<std::size_t>(n);
    if (adj[u].size() < 2) continue;
    auto it = adj[u].begin();
    std::advance(it, static_cast<long>(rng() % adj[u].size()));
    const int v = *it;
    if (adj[static_cast<std::size_t>(v)].size() < 2) continue;
    adj[u].erase(v);
    adj[static_cast<std::size_t>(v)].erase(static_cast<int>(u));
    --m_now;
  }

  // Structure score per edge: (1 + common neighbors) / sqrt(deg_u * deg_v).
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m_now));
  std::vector<double> raw;
  raw.reserve(static_cast<std::size_t>(m_now));
  for (int u = 0; u < n; ++u) {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (u >= v) continue;
      std::size_t cn = 0;
      const auto& su = adj[static_cast<std::size_t>(u)];
      const auto& sv = adj[static_cast<std::size_t>(v)];
      const auto& small = su.size() <= sv.size() ? su : sv;
      const auto& big = su.size() <= sv.size() ? sv : su;
      for (int z : small) cn += big.count(z);
      const double score =
          (1.0 + static_cast<double>(cn)) /
          std::sqrt(static_cast<double>(su.size()) * static_cast<double>(sv.size()));
      raw.push_back(std::log(score) + spec.noise_sigma * detail::normal01(rng));
      edges.push_back({u, v, 0.0});
    }
  }

  // Monotone quantile map: the percentile rank of each raw score lands in a
  // log-range distribution skewed by `shape`, spanning [w_min, w_max] exactly.
  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&raw](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  const double ratio = spec.w_max / spec.w_min;
  const double denom = std::max<double>(1.0, static_cast<double>(raw.size()) - 1.0);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const double u = static_cast<double>(rank) / denom;
    double w = spec.w_min * std::pow(ratio, std::pow(u, spec.shape));
    if (spec.integer_weights)
      w = std::clamp(static_cast<double>(std::llround(w)), std::ceil(spec.w_min),
                     std::floor(spec.w_max));
    edges[order[rank]].w = w;
  }
  return WeightedGraph::from_edges(n, std::move(edges));
}

/// Stand-in recipes matching the published benchmark scales
/// (node count, edge count, weight range).
inline SynthSpec synth_preset(std::string_view name, std::uint64_t seed = 7) {
  SynthSpec s;
  s.name = std::string(name);
  s.seed = seed;
  if (name == "neural") {
    s.nodes = 296; s.edges = 2137; s.w_min = 1; s.w_max = 72; s.integer_weights = true;
    s.noise_sigma = 0.6; s.triad_prob = 0.35; s.shape = 3.0;
  } else if (name == "celegans") {
    s.nodes = 453; s.edges = 2025; s.w_min = 1; s.w_max = 114; s.integer_weights = true;
    s.noise_sigma = 0.6; s.triad_prob = 0.35; s.shape = 3.0;
  } else if (name == "netscience") {
    s.nodes = 575; s.edges = 1028; s.w_min = 0.0526; s.w_max = 2.5; s.integer_weights = false;
    s.noise_sigma = 0.45; s.triad_prob = 0.7; s.shape = 1.0;
  } else if (name == "pblog") {
    s.nodes = 1224; s.edges = 16715; s.w_min = 1; s.w_max = 3; s.integer_weights = true;
    s.noise_sigma = 0.8; s.triad_prob = 0.3; s.shape = 2.0;
  } else if (name == "ucsocial") {
    s.nodes = 1899; s.edges = 13838; s.w_min = 1; s.w_max = 184; s.integer_weights = true;
    s.noise_sigma = 0.8; s.triad_prob = 0.3; s.shape = 3.0;
  } else if (name == "condmat") {
    s.nodes = 16264; s.edges = 47594; s.w_min = 0.058824; s.w_max = 22.3333;
    s.integer_weights = false; s.noise_sigma = 0.5; s.triad_prob = 0.6; s.shape = 1.5;
  } else {
    throw std::invalid_argument("unknown synth preset: " + std::string(name));
  }
  return s;
}

}  // namespace lwp
