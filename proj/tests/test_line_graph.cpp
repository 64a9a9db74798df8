#include <map>
#include <set>
#include <utility>

#include <catch2/catch_amalgamated.hpp>

#include "lwp/line_graph.hpp"
#include "oracles.hpp"

using lwp::Edge;
using lwp::EnclosingSubgraph;
using lwp::LineGraphSample;
using lwp::NodeOrdering;
using lwp::WeightedGraph;

namespace {

LineGraphSample pipeline(const WeightedGraph& g, int v1, int v2, std::uint64_t seed = 0,
                         int max_nodes = 10) {
  const EnclosingSubgraph sg = lwp::extract_enclosing_subgraph(g, v1, v2, 1, max_nodes, seed);
  const NodeOrdering ord = lwp::order_nodes_wwl(sg);
  const lwp::OrderedFeatureMatrix fm = lwp::build_feature_matrix(sg, ord, max_nodes);
  return lwp::to_line_graph(sg, fm, ord);
}

long edge_count_of(const Eigen::MatrixXd& a) {
  return static_cast<long>(a.sum() / 2.0);
}

}  // namespace

TEST_CASE("triangle maps to a triangle", "[linegraph]") {
  const WeightedGraph g =
      WeightedGraph::from_edges(3, {{0, 1, 0.3}, {0, 2, 0.4}, {1, 2, 0.5}});
  const LineGraphSample s = pipeline(g, 0, 1);
  CHECK(s.n_lg == 3);
  CHECK(edge_count_of(s.lg_adjacency) == 3);
}

TEST_CASE("two-edge path maps to a single line edge", "[linegraph]") {
  const WeightedGraph g = WeightedGraph::from_edges(3, {{0, 1, 0.3}, {1, 2, 0.4}});
  // Target (0,1); the subgraph keeps edge (1,2), so the line graph has the
  // masked target node plus one known edge sharing endpoint 1.
  const LineGraphSample s = pipeline(g, 0, 1);
  CHECK(s.n_lg == 2);
  CHECK(edge_count_of(s.lg_adjacency) == 1);
}

TEST_CASE("line node and edge counts match the direct construction", "[linegraph]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const WeightedGraph g = oracle::random_graph(8, 0.45, seed);
    const int v2 = 1 + static_cast<int>(seed % 7);
    const EnclosingSubgraph sg = lwp::extract_enclosing_subgraph(g, 0, v2, 1, 8, seed);
    const NodeOrdering ord = lwp::order_nodes_wwl(sg);
    const auto fm = lwp::build_feature_matrix(sg, ord, 8);
    const LineGraphSample s = lwp::to_line_graph(sg, fm, ord);

    // Direct construction over the structural edge list (target included).
    std::vector<std::pair<int, int>> structural;
    structural.emplace_back(0, 1);
    for (const Edge& e : sg.edges)
      structural.emplace_back(ord.position_of(e.u), ord.position_of(e.v));
    const auto [nodes, edges] = oracle::line_graph_counts(structural);
    CHECK(s.n_lg == nodes);
    CHECK(edge_count_of(s.lg_adjacency) == edges);

    // Degree-sum identity over the subgraph (structural degrees).
    std::map<int, int> deg;
    for (const auto& [a, b] : structural) {
      deg[a]++;
      deg[b]++;
    }
    long expected = 0;
    for (const auto& [node, d] : deg) expected += static_cast<long>(d) * (d - 1) / 2;
    CHECK(edge_count_of(s.lg_adjacency) == expected);

    // Per-line-node degree identity deg_L(e) = deg(u) + deg(v) - 2.
    for (int a = 0; a < s.n_lg; ++a) {
      const auto& [u, v] = s.line_nodes[static_cast<std::size_t>(a)];
      CHECK(static_cast<int>(s.lg_adjacency.row(a).sum()) == deg[u] + deg[v] - 2);
    }
  }
}

TEST_CASE("adjacency is symmetric with a zero diagonal", "[linegraph]") {
  const WeightedGraph g = oracle::random_graph(12, 0.4, 5);
  const LineGraphSample s = pipeline(g, 0, 3, 5);
  CHECK((s.lg_adjacency - s.lg_adjacency.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.lg_adjacency.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feature vectors ignore endpoint order", "[linegraph]") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const WeightedGraph g = oracle::random_graph(10, 0.4, seed ^ 0xF00Dull);
    const int v2 = 1 + static_cast<int>(seed % 9);
    const EnclosingSubgraph sg = lwp::extract_enclosing_subgraph(g, 0, v2, 1, 10, seed);
    const NodeOrdering ord = lwp::order_nodes_wwl(sg);
    const auto fm = lwp::build_feature_matrix(sg, ord, 10);
    for (const Edge& e : sg.edges) {
      const Eigen::VectorXd a = lwp::line_node_features({e.u, e.v}, fm, ord);
      const Eigen::VectorXd b = lwp::line_node_features({e.v, e.u}, fm, ord);
      CHECK((a.array() == b.array()).all());
    }
  }
}

TEST_CASE("two-node subgraph yields the concatenated mask rows", "[linegraph]") {
  const WeightedGraph g = WeightedGraph::from_edges(2, {{0, 1, 0.6}});
  const LineGraphSample s = pipeline(g, 0, 1);
  REQUIRE(s.n_lg == 1);
  CHECK(s.target_index == 0);
  REQUIRE(s.features.cols() == 20);
  CHECK(s.features(0, 1) == -1.0);
  CHECK(s.features(0, 10) == -1.0);
  CHECK(s.features.row(0).cwiseAbs().sum() == 2.0);
}

TEST_CASE("target line node exists and carries the mask entries", "[linegraph]") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const WeightedGraph g = oracle::random_graph(14, 0.35, seed);
    const int v2 = 1 + static_cast<int>(seed % 13);
    const LineGraphSample s = pipeline(g, 0, v2, seed);
    REQUIRE(s.target_index >= 0);
    REQUIRE(s.target_index < s.n_lg);
    CHECK(s.line_nodes[static_cast<std::size_t>(s.target_index)] == std::make_pair(0, 1));
    CHECK(s.features(s.target_index, 1) == -1.0);
    CHECK(s.features(s.target_index, 10) == -1.0);
  }
}

TEST_CASE("feature row width is twice the node budget", "[linegraph]") {
  const WeightedGraph g = oracle::random_graph(9, 0.5, 3);
  const LineGraphSample s = pipeline(g, 0, 2, 3, 7);
  CHECK(s.features.cols() == 14);
  CHECK(s.features.rows() == s.n_lg);
}

TEST_CASE("endpoints outside the ordering are rejected", "[linegraph]") {
  const WeightedGraph g = WeightedGraph::from_edges(3, {{0, 1, 0.3}, {1, 2, 0.4}});
  const EnclosingSubgraph sg = lwp::extract_enclosing_subgraph(g, 0, 1, 1, 10, 0);
  const NodeOrdering ord = lwp::order_nodes_wwl(sg);
  const auto fm = lwp::build_feature_matrix(sg, ord, 10);
  CHECK_THROWS_AS(lwp::line_node_features({0, 99}, fm, ord), std::invalid_argument);
}
