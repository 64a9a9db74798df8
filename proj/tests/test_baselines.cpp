#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "lwp/baselines.hpp"
#include "oracles.hpp"

using lwp::WeightedGraph;

TEST_CASE("no common neighbors scores zero", "[baselines]") {
  const WeightedGraph g = WeightedGraph::from_edges(4, {{0, 2, 0.5}, {1, 3, 0.5}});
  CHECK(lwp::wcn(g, 0, 1) == 0.0);
  CHECK(lwp::waa(g, 0, 1) == 0.0);
  CHECK(lwp::wra(g, 0, 1) == 0.0);
}

TEST_CASE("single common neighbor sums both incident weights", "[baselines]") {
  const WeightedGraph g = WeightedGraph::from_edges(3, {{0, 2, 0.2}, {2, 1, 0.3}});
  CHECK_THAT(lwp::wcn(g, 0, 1), Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("wra divides by the neighbor strength", "[baselines]") {
  // strength(2) = 0.4 + 0.6 = 1.0
  const WeightedGraph g = WeightedGraph::from_edges(3, {{0, 2, 0.4}, {2, 1, 0.6}});
  CHECK_THAT(lwp::wra(g, 0, 1), Catch::Matchers::WithinAbs(1.0, 1e-15));
}

TEST_CASE("waa denominator is one when strength is e minus one", "[baselines]") {
  const double e_minus_1 = std::exp(1.0) - 1.0;
  const WeightedGraph g =
      WeightedGraph::from_edges(3, {{0, 2, e_minus_1 / 2}, {2, 1, e_minus_1 / 2}});
  CHECK_THAT(lwp::waa(g, 0, 1), Catch::Matchers::WithinRel(e_minus_1, 1e-12));
}

TEST_CASE("heuristics equal the brute-force scan on small graphs", "[baselines]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 5 + static_cast<int>(seed % 4);  // 5..8 nodes
    const WeightedGraph g = oracle::random_graph(n, 0.45, seed);
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        CHECK_THAT(lwp::wcn(g, u, v), Catch::Matchers::WithinAbs(oracle::wcn_scan(g, u, v), 1e-12));
        CHECK_THAT(lwp::waa(g, u, v), Catch::Matchers::WithinAbs(oracle::waa_scan(g, u, v), 1e-12));
        CHECK_THAT(lwp::wra(g, u, v), Catch::Matchers::WithinAbs(oracle::wra_scan(g, u, v), 1e-12));
      }
  }
}

TEST_CASE("heuristics are symmetric in the endpoints", "[baselines]") {
  const WeightedGraph g = oracle::random_graph(12, 0.4, 17);
  for (int u = 0; u < 12; ++u)
    for (int v = u + 1; v < 12; ++v) {
      CHECK(lwp::wcn(g, u, v) == lwp::wcn(g, v, u));
      CHECK(lwp::waa(g, u, v) == lwp::waa(g, v, u));
      CHECK(lwp::wra(g, u, v) == lwp::wra(g, v, u));
    }
}

TEST_CASE("adding a common neighbor never lowers wcn", "[baselines]") {
  const WeightedGraph before = WeightedGraph::from_edges(4, {{0, 2, 0.3}, {2, 1, 0.4}});
  const WeightedGraph after =
      WeightedGraph::from_edges(4, {{0, 2, 0.3}, {2, 1, 0.4}, {0, 3, 0.2}, {3, 1, 0.1}});
  CHECK(lwp::wcn(after, 0, 1) >= lwp::wcn(before, 0, 1));
}

TEST_CASE("calibration reproduces an exact line", "[baselines]") {
  const std::vector<std::pair<double, double>> train = {{0.0, 0.2}, {1.0, 0.4}};
  const auto pred = lwp::calibrate_and_predict({0.5}, train);
  REQUIRE(pred.size() == 1);
  CHECK_THAT(pred[0], Catch::Matchers::WithinAbs(0.3, 1e-12));
}

TEST_CASE("degenerate calibration falls back to the mean weight", "[baselines]") {
  const std::vector<std::pair<double, double>> train = {{2.0, 0.2}, {2.0, 0.6}, {2.0, 0.4}};
  const auto pred = lwp::calibrate_and_predict({0.0, 5.0}, train);
  CHECK_THAT(pred[0], Catch::Matchers::WithinAbs(0.4, 1e-12));
  CHECK_THAT(pred[1], Catch::Matchers::WithinAbs(0.4, 1e-12));
}

TEST_CASE("calibration clamps into the open unit interval", "[baselines]") {
  const std::vector<std::pair<double, double>> train = {{0.0, 0.1}, {1.0, 0.9}};
  const auto pred = lwp::calibrate_and_predict({-10.0, 10.0}, train);
  CHECK(pred[0] == 1e-6);
  CHECK(pred[1] == 1.0 - 1e-6);
}

TEST_CASE("fitted slope recovers a noisy linear generator", "[baselines]") {
  std::mt19937_64 rng(lwp::mix64(8));
  const double slope = 0.07;
  const double intercept = 0.2;
  const double sigma = 0.01;
  std::vector<std::pair<double, double>> train;
  for (int i = 0; i < 400; ++i) {
    const double x = 8.0 * lwp::uniform01(rng);
    double noise = 0.0;
    for (int k = 0; k < 12; ++k) noise += lwp::uniform01(rng) - 0.5;  // ~N(0,1)
    train.emplace_back(x, slope * x + intercept + sigma * noise);
  }
  const lwp::AffineFit fit = lwp::fit_score_calibration(train);
  // 3 sigma of the slope estimate: sigma / (sqrt(n) * std(x)), std(x) ~ 8/sqrt(12)
  const double slope_sigma = sigma / (std::sqrt(400.0) * 8.0 / std::sqrt(12.0));
  CHECK(std::abs(fit.slope - slope) < 3.0 * slope_sigma);
  CHECK(std::abs(fit.intercept - intercept) < 0.01);
}

TEST_CASE("calibration needs two points", "[baselines]") {
  CHECK_THROWS_AS(lwp::calibrate_and_predict({1.0}, {{0.5, 0.5}}), std::invalid_argument);
}
