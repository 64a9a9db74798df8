#include <cmath>
#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "lwp/experiment.hpp"
#include "lwp/synth.hpp"
#include "oracles.hpp"

using lwp::ExperimentConfig;
using lwp::Method;
using lwp::WeightedGraph;

namespace {

// Ring of triangles: enough structure for subgraphs, small enough to be fast.
WeightedGraph toy_network(int hubs = 12) {
  std::vector<lwp::Edge> edges;
  std::mt19937_64 rng(lwp::mix64(5));
  const int n = 2 * hubs;
  for (int i = 0; i < hubs; ++i) {
    const int a = i;
    const int b = (i + 1) % hubs;
    const int lift = hubs + i;
    edges.push_back({a, b, 1.0 + 3.0 * lwp::uniform01(rng)});
    edges.push_back({a, lift, 1.0 + 3.0 * lwp::uniform01(rng)});
    edges.push_back({b, lift, 1.0 + 3.0 * lwp::uniform01(rng)});
  }
  return lwp::WeightedGraph::from_edges(n, std::move(edges));
}

ExperimentConfig fast_config(Method m) {
  ExperimentConfig cfg;
  cfg.method = m;
  cfg.repeats = 2;
  cfg.train_ratio = 0.8;
  cfg.epochs = 3;
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("rmse matches hand-evaluated cases", "[harness]") {
  CHECK(lwp::rmse({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  CHECK(lwp::rmse({0.0, 0.0}, {1.0, 1.0}) == 1.0);
  CHECK_THAT(lwp::rmse({0.1, 0.4}, {0.2, 0.2}),
             Catch::Matchers::WithinAbs(0.158113883008419, 1e-12));
  CHECK_THROWS_AS(lwp::rmse({0.1}, {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(lwp::rmse({}, {}), std::invalid_argument);
}

TEST_CASE("default epoch rule follows dataset size", "[harness]") {
  CHECK(lwp::default_epochs(1028) == 15);
  CHECK(lwp::default_epochs(2137) == 15);
  CHECK(lwp::default_epochs(9999) == 15);
  CHECK(lwp::default_epochs(13838) == 5);
  CHECK(lwp::default_epochs(47594) == 5);
}

TEST_CASE("heuristic experiment: per-run results without loss curves", "[harness]") {
  const WeightedGraph g = lwp::normalize_weights(toy_network());
  const lwp::EvalReport report = lwp::run_experiment(g, fast_config(Method::Wcn));
  CHECK(report.per_run_rmse.size() == 2);
  CHECK(report.failed_runs == 0);
  for (const auto& run : report.runs) {
    CHECK(run.loss_curve.empty());
    CHECK(run.rmse >= 0.0);
  }
}

TEST_CASE("gcn experiment produces loss curves and aggregates", "[harness]") {
  const WeightedGraph g = lwp::normalize_weights(toy_network());
  const lwp::EvalReport report = lwp::run_experiment(g, fast_config(Method::Lglwp));
  REQUIRE(report.per_run_rmse.size() == 2);
  for (const auto& run : report.runs) {
    CHECK(run.status == "ok");
    CHECK(run.loss_curve.size() == 3);
  }
  // mean/std must be recomputable from the per-run values.
  double mean = 0.0;
  for (double x : report.per_run_rmse) mean += x;
  mean /= static_cast<double>(report.per_run_rmse.size());
  double var = 0.0;
  for (double x : report.per_run_rmse) var += (x - mean) * (x - mean);
  const double stddev = std::sqrt(var / static_cast<double>(report.per_run_rmse.size() - 1));
  CHECK_THAT(report.mean_rmse, Catch::Matchers::WithinAbs(mean, 1e-12));
  CHECK_THAT(report.std_rmse, Catch::Matchers::WithinAbs(stddev, 1e-12));
}

TEST_CASE("reports are byte-identical apart from wall time", "[harness]") {
  const WeightedGraph g = lwp::normalize_weights(toy_network());
  const auto a = lwp::run_experiment(g, fast_config(Method::Lglwp));
  const auto b = lwp::run_experiment(g, fast_config(Method::Lglwp));
  CHECK(lwp::report_json(a, false).dump() == lwp::report_json(b, false).dump());
}

TEST_CASE("failed repeats are recorded, not fatal", "[harness]") {
  // 0.9 of 3 edges rounds to all edges -> empty test side -> every repeat fails.
  const WeightedGraph g = lwp::normalize_weights(
      WeightedGraph::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}}));
  ExperimentConfig cfg = fast_config(Method::Wcn);
  cfg.train_ratio = 0.9;
  const lwp::EvalReport report = lwp::run_experiment(g, cfg);
  CHECK(report.failed_runs == 2);
  CHECK(report.per_run_rmse.empty());
  for (const auto& run : report.runs) CHECK(run.status.rfind("failed:", 0) == 0);
}

TEST_CASE("test-leak guard trips on planted leaks", "[harness]") {
  const WeightedGraph g = lwp::normalize_weights(toy_network());
  const auto split = lwp::split_train_test(g, {0.8, 4, 1});
  const WeightedGraph view =
      WeightedGraph::from_edges(g.node_count(), split.train_edges, g.names());
  ExperimentConfig cfg = fast_config(Method::Lglwp);

  const lwp::Edge test_edge = split.test_edges.front();
  lwp::LinkSample sample =
      lwp::build_link_sample(view, test_edge.u, test_edge.v, std::nullopt, cfg, 4);
  CHECK_NOTHROW(lwp::verify_no_test_leak({sample}, split.test_edges, cfg.max_nodes));

  lwp::LinkSample corrupted = sample;
  corrupted.sg.edges.push_back(test_edge);  // plant a hidden-weight edge
  CHECK_THROWS_AS(lwp::verify_no_test_leak({corrupted}, split.test_edges, cfg.max_nodes),
                  std::runtime_error);

  lwp::LinkSample unmasked = sample;
  unmasked.lg.features(unmasked.lg.target_index, 1) = 0.5;  // overwrite the mask
  CHECK_THROWS_AS(lwp::verify_no_test_leak({unmasked}, split.test_edges, cfg.max_nodes),
                  std::runtime_error);
}

TEST_CASE("ablation arms share identical splits", "[harness]") {
  const WeightedGraph g = lwp::normalize_weights(toy_network());
  const lwp::AblationReport ab = lwp::run_ablation(g, fast_config(Method::Lglwp));
  REQUIRE(ab.weighted.runs.size() == ab.random.runs.size());
  for (std::size_t r = 0; r < ab.weighted.runs.size(); ++r)
    CHECK(ab.weighted.runs[r].test_edges == ab.random.runs[r].test_edges);
  CHECK(ab.per_run_delta.size() == 2);
}

TEST_CASE("automorphic equal-weight subgraphs make the ordering method moot", "[harness]") {
  // Targets 0,1; every other node joins both targets with the same weight, so
  // any targets-first ordering yields the same matrix and the same prediction.
  std::vector<lwp::Edge> edges = {{0, 1, 2.0}};
  for (int k = 2; k < 10; ++k) {
    edges.push_back({0, k, 2.0});
    edges.push_back({1, k, 2.0});
  }
  const WeightedGraph g =
      lwp::normalize_weights(WeightedGraph::from_edges(10, std::move(edges)));

  const auto sg = lwp::extract_enclosing_subgraph(g, 0, 1, 1, 10, 3);
  const auto wwl = lwp::build_feature_matrix(sg, lwp::order_nodes_wwl(sg), 10);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto rnd = lwp::build_feature_matrix(sg, lwp::order_nodes_random(sg, seed), 10);
    CHECK((wwl.m.array() == rnd.m.array()).all());
  }

  auto to_sample = [&](const lwp::NodeOrdering& ord) {
    auto fm = lwp::build_feature_matrix(sg, ord, 10);
    return lwp::to_line_graph(sg, fm, ord);
  };
  const lwp::ModelParams params = lwp::ModelParams::glorot(20, 55);
  const double base = lwp::gcn_forward(to_sample(lwp::order_nodes_wwl(sg)), params);
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    CHECK(lwp::gcn_forward(to_sample(lwp::order_nodes_random(sg, seed)), params) == base);
}

TEST_CASE("report files land on disk and parse back", "[harness]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lwp_report_test";
  fs::remove_all(dir);

  const WeightedGraph raw = toy_network();
  const fs::path dataset = dir / "toy.edges";
  fs::create_directories(dir);
  {
    std::ofstream out(dataset);
    lwp::write_edge_list(raw, out);
  }
  ExperimentConfig cfg = fast_config(Method::Lglwp);
  cfg.dataset_path = dataset.string();
  cfg.output_path = (dir / "out").string();
  const lwp::EvalReport report = lwp::run_experiment(cfg);
  CHECK(report.per_run_rmse.size() == 2);

  for (const char* name : {"report.json", "loss_curves.csv", "id_map.json", "splits.json"}) {
    CHECK(fs::exists(dir / "out" / name));
  }
  std::ifstream in(dir / "out" / "report.json");
  nlohmann::json j;
  in >> j;
  CHECK(j.at("config").at("method") == "lglwp");
  CHECK(j.at("per_run_rmse").size() == 2);
  CHECK(j.contains("wall_time_seconds"));

  std::ifstream sin(dir / "out" / "splits.json");
  nlohmann::json sj;
  sin >> sj;
  CHECK(sj.at("runs").size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("synthetic generator hits the requested shape", "[harness]") {
  lwp::SynthSpec spec;
  spec.nodes = 200;
  spec.edges = 700;
  spec.w_min = 0.5;
  spec.w_max = 9.0;
  spec.seed = 13;
  const WeightedGraph g = lwp::synth_weighted_graph(spec);
  CHECK(g.node_count() == 200);
  CHECK(g.edge_count() == 700);
  double lo = 1e18, hi = -1e18;
  for (const auto& e : g.edges()) {
    lo = std::min(lo, e.w);
    hi = std::max(hi, e.w);
  }
  CHECK_THAT(lo, Catch::Matchers::WithinRel(0.5, 1e-9));
  CHECK_THAT(hi, Catch::Matchers::WithinRel(9.0, 1e-9));
  for (int u = 0; u < g.node_count(); ++u) CHECK(g.degree(u) >= 1);

  const WeightedGraph same = lwp::synth_weighted_graph(spec);
  CHECK(same.edges() == g.edges());
}

TEST_CASE("method names round-trip", "[harness]") {
  for (const char* name : {"lglwp", "lglwp_random_label", "wcn", "waa", "wra"})
    CHECK(lwp::method_name(lwp::parse_method(name)) == std::string(name));
  CHECK_THROWS_AS(lwp::parse_method("node2vec"), std::invalid_argument);
}
