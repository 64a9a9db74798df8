#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lwp/labeling.hpp"
#include "lwp/subgraph.hpp"

namespace lwp {

/// Line graph of an ordered enclosing subgraph. Every subgraph edge becomes a
/// line node (the masked target edge included, as a purely structural node);
/// two line nodes are adjacent when the underlying edges share an endpoint.
/// Each line node carries the concatenated feature rows of its endpoints.
struct LineGraphSample {
  int n_lg = 0;
  Eigen::MatrixXd lg_adjacency;                 // n_lg x n_lg, binary, zero diagonal
  Eigen::MatrixXd features;                     // n_lg x 2*max_nodes
  int target_index = 0;                         // line node of the target link
  std::optional<double> label;                  // true normalized weight, training only
  std::vector<std::pair<int, int>> line_nodes;  // ordering positions (i<j) per line node
};

/// Feature vector of the line node for edge e = (u,v): the feature-matrix row
/// of the smaller-position endpoint followed by the row of the larger one,
/// which makes the result independent of the endpoint order given.
inline Eigen::VectorXd line_node_features(std::pair<int, int> e, const OrderedFeatureMatrix& fm,
                                          const NodeOrdering& ord) {
  const int pu = ord.position_of(e.first);
  const int pv = ord.position_of(e.second);
  if (pu < 0 || pv < 0) throw std::invalid_argument("edge endpoint not in ordering");
  const int lo = std::min(pu, pv);
  const int hi = std::max(pu, pv);
  const auto width = fm.m.cols();
  Eigen::VectorXd out(2 * width);
  out.head(width) = fm.m.row(lo).transpose();
  out.tail(width) = fm.m.row(hi).transpose();
  return out;
}

inline LineGraphSample to_line_graph(const EnclosingSubgraph& sg, const OrderedFeatureMatrix& fm,
                                     const NodeOrdering& ord) {
  if (ord.order.size() != sg.nodes.size())
    throw std::invalid_argument("ordering does not match subgraph");

  LineGraphSample sample;
  // Position pairs, the structural target edge first as (0,1).
  sample.line_nodes.emplace_back(0, 1);
  for (const Edge& e : sg.edges) {
    const int pu = ord.position_of(e.u);
    const int pv = ord.position_of(e.v);
    if (pu < 0 || pv < 0) throw std::invalid_argument("subgraph edge endpoint missing from ordering");
    sample.line_nodes.emplace_back(std::min(pu, pv), std::max(pu, pv));
  }
  std::sort(sample.line_nodes.begin(), sample.line_nodes.end());

  sample.n_lg = static_cast<int>(sample.line_nodes.size());
  const auto target_it =
      std::lower_bound(sample.line_nodes.begin(), sample.line_nodes.end(), std::make_pair(0, 1));
  sample.target_index = static_cast<int>(target_it - sample.line_nodes.begin());

  sample.lg_adjacency = Eigen::MatrixXd::Zero(sample.n_lg, sample.n_lg);
  for (int a = 0; a < sample.n_lg; ++a) {
    for (int b = a + 1; b < sample.n_lg; ++b) {
      const auto& ea = sample.line_nodes[static_cast<std::size_t>(a)];
      const auto& eb = sample.line_nodes[static_cast<std::size_t>(b)];
      const bool shared = ea.first == eb.first || ea.first == eb.second ||
                          ea.second == eb.first || ea.second == eb.second;
      if (shared) {
        sample.lg_adjacency(a, b) = 1.0;
        sample.lg_adjacency(b, a) = 1.0;
      }
    }
  }

  sample.features.resize(sample.n_lg, 2 * fm.m.cols());
  for (int a = 0; a < sample.n_lg; ++a) {
    const auto& [lo, hi] = sample.line_nodes[static_cast<std::size_t>(a)];
    sample.features.row(a).head(fm.m.cols()) = fm.m.row(lo);
    sample.features.row(a).tail(fm.m.cols()) = fm.m.row(hi);
  }
  return sample;
}

}  // namespace lwp
