#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>
#include <vector>

#include "lwp/graph.hpp"

namespace lwp {

namespace detail {

// (z, w(u,z), w(z,v)) for every common neighbor z, via a merge of the sorted
// adjacency lists. The no-self-loop invariant guarantees z != u and z != v.
inline std::vector<std::tuple<int, double, double>> common_neighbor_terms(const WeightedGraph& g,
                                                                          int u, int v) {
  const auto& nu = g.neighbors(u);
  const auto& nv = g.neighbors(v);
  std::vector<std::tuple<int, double, double>> out;
  std::size_t i = 0, j = 0;
  while (i < nu.size() && j < nv.size()) {
    if (nu[i].first < nv[j].first) {
      ++i;
    } else if (nu[i].first > nv[j].first) {
      ++j;
    } else {
      out.emplace_back(nu[i].first, nu[i].second, nv[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace detail

/// Weighted common neighbors: sum of w(u,z) + w(z,v) over common neighbors z.
inline double wcn(const WeightedGraph& g, int u, int v) {
  double score = 0.0;
  for (const auto& [z, wu, wv] : detail::common_neighbor_terms(g, u, v)) score += wu + wv;
  return score;
}

/// Weighted Adamic-Adar: each common-neighbor term damped by log(1 + s(z)),
/// s(z) the strength (summed incident weight) of z. A common neighbor has at
/// least two incident edges, so the denominator is always positive.
inline double waa(const WeightedGraph& g, int u, int v) {
  double score = 0.0;
  for (const auto& [z, wu, wv] : detail::common_neighbor_terms(g, u, v))
    score += (wu + wv) / std::log1p(g.strength(z));
  return score;
}

/// Weighted resource allocation: terms damped by the strength itself.
inline double wra(const WeightedGraph& g, int u, int v) {
  double score = 0.0;
  for (const auto& [z, wu, wv] : detail::common_neighbor_terms(g, u, v))
    score += (wu + wv) / g.strength(z);
  return score;
}

struct HeuristicScore {
  std::pair<int, int> link;
  double score = 0.0;
};

/// Least-squares affine map from raw heuristic scores to normalized weights.
struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;  // all train scores equal; intercept = mean weight
};

inline AffineFit fit_score_calibration(const std::vector<std::pair<double, double>>& train_pairs) {
  if (train_pairs.size() < 2)
    throw std::invalid_argument("calibration needs at least 2 train pairs");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : train_pairs) {
    sx += x;
    sy += y;
  }
  const double n = static_cast<double>(train_pairs.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : train_pairs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  AffineFit fit;
  if (sxx == 0.0) {
    fit.degenerate = true;
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

/// Fits on (score, weight) train pairs and maps the test scores, clamped into
/// (eps, 1-eps). Degenerate fits fall back to the train-mean weight.
inline std::vector<double> calibrate_and_predict(const std::vector<double>& test_scores,
                                                 const std::vector<std::pair<double, double>>& train_pairs,
                                                 double eps = 1e-6) {
  const AffineFit fit = fit_score_calibration(train_pairs);
  std::vector<double> out;
  out.reserve(test_scores.size());
  for (double s : test_scores) {
    const double y = fit.degenerate ? fit.intercept : fit.slope * s + fit.intercept;
    out.push_back(std::clamp(y, eps, 1.0 - eps));
  }
  return out;
}

}  // namespace lwp
