#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lwp/baselines.hpp"
#include "lwp/common.hpp"
#include "lwp/gcn.hpp"
#include "lwp/graph.hpp"
#include "lwp/labeling.hpp"
#include "lwp/line_graph.hpp"
#include "lwp/subgraph.hpp"

namespace lwp {

enum class Method { Lglwp, LglwpRandomLabel, Wcn, Waa, Wra };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Lglwp: return "lglwp";
    case Method::LglwpRandomLabel: return "lglwp_random_label";
    case Method::Wcn: return "wcn";
    case Method::Waa: return "waa";
    case Method::Wra: return "wra";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  if (name == "lglwp") return Method::Lglwp;
  if (name == "lglwp_random_label") return Method::LglwpRandomLabel;
  if (name == "wcn") return Method::Wcn;
  if (name == "waa") return Method::Waa;
  if (name == "wra") return Method::Wra;
  throw std::invalid_argument("unknown method: " + name);
}

/// Full experiment description. Defaults reproduce the evaluation protocol:
/// 90/10 split, 10 repeats, 10-node subgraphs, 1 hop, and an epoch count
/// chosen by dataset size (5 when |E| >= 10000, else 15) unless given.
struct ExperimentConfig {
  std::string dataset_path;
  double train_ratio = 0.9;
  int repeats = 10;
  int epochs = 0;  // 0 = size-based default
  Method method = Method::Lglwp;
  std::uint64_t seed = 42;
  int max_nodes = 10;
  int hop = 1;
  std::string output_path;  // directory; empty = no files written
  DupPolicy dup_policy = DupPolicy::Max;
  DistanceMode dist_mode = DistanceMode::Weight;
  int batch_size = 32;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::Adam;
  double test_fraction = 1.0;  // evaluate on this seeded fraction of test links
  bool save_models = false;
};

inline int default_epochs(std::size_t edge_count) { return edge_count >= 10000 ? 5 : 15; }

struct RunResult {
  int run = 0;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  std::vector<double> loss_curve;
  std::string status = "ok";  // "ok" or "failed: <why>"
  std::vector<std::pair<std::string, std::string>> test_edges;  // original tokens
};

struct EvalReport {
  ExperimentConfig config;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::vector<RunResult> runs;
  std::vector<double> per_run_rmse;  // successful runs only
  double mean_rmse = 0.0;
  double std_rmse = 0.0;  // sample standard deviation (n-1)
  int failed_runs = 0;
  double wall_time_seconds = 0.0;
};

/// Root mean squared error between two equal-length, non-empty vectors.
inline double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("rmse: length mismatch");
  if (pred.empty()) throw std::invalid_argument("rmse: empty input");
  double sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sq += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(sq / static_cast<double>(pred.size()));
}

namespace detail {

inline std::uint64_t pair_key(int u, int v) {
  const auto [a, b] = canonical_pair(u, v);
  return static_cast<std::uint64_t>(a) << 32 | static_cast<std::uint64_t>(b);
}

}  // namespace detail

/// Per-link sample: enclosing subgraph of the pair in the train view, ordered,
/// encoded, and line-graph transformed. The link's own weight is structurally
/// masked whether or not the edge is present in `view`.
struct LinkSample {
  EnclosingSubgraph sg;
  LineGraphSample lg;
};

inline LinkSample build_link_sample(const WeightedGraph& view, int u, int v,
                                    std::optional<double> label, const ExperimentConfig& cfg,
                                    std::uint64_t run_seed) {
  const std::uint64_t ls = link_seed(run_seed, u, v);
  LinkSample out;
  out.sg = extract_enclosing_subgraph(view, u, v, cfg.hop, cfg.max_nodes, ls);
  const NodeOrdering ord = cfg.method == Method::LglwpRandomLabel
                               ? order_nodes_random(out.sg, mix64(ls ^ 0xAB1A7E0Full))
                               : order_nodes_wwl(out.sg, cfg.dist_mode);
  const OrderedFeatureMatrix fm = build_feature_matrix(out.sg, ord, cfg.max_nodes);
  out.lg = to_line_graph(out.sg, fm, ord);
  out.lg.label = label;
  return out;
}

/// Asserts that no sample's known-edge list contains a test pair (their
/// weights must be invisible to training) and that every feature block has
/// the -1 mask at the target slots. Throws on violation.
inline void verify_no_test_leak(const std::vector<LinkSample>& samples,
                                const std::vector<Edge>& test_edges, int max_nodes) {
  std::unordered_set<std::uint64_t> hidden;
  hidden.reserve(test_edges.size() * 2);
  for (const Edge& e : test_edges) hidden.insert(detail::pair_key(e.u, e.v));
  for (const LinkSample& s : samples) {
    for (const Edge& e : s.sg.edges) {
      if (hidden.count(detail::pair_key(e.u, e.v)))
        throw std::runtime_error("test-leak guard: test edge present in a sample subgraph");
      if (canonical_pair(e.u, e.v) == canonical_pair(s.sg.target.first, s.sg.target.second))
        throw std::runtime_error("test-leak guard: target edge present with a weight");
    }
    const int t = s.lg.target_index;
    if (s.lg.features(t, 1) != -1.0 || s.lg.features(t, max_nodes) != -1.0)
      throw std::runtime_error("test-leak guard: target feature block is missing the -1 mask");
  }
}

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline double heuristic_score_for(Method m, const WeightedGraph& g, int u, int v) {
  switch (m) {
    case Method::Wcn: return wcn(g, u, v);
    case Method::Waa: return waa(g, u, v);
    case Method::Wra: return wra(g, u, v);
    default: throw std::invalid_argument("not a heuristic method");
  }
}

// Seeded subsample of test-edge indices when test_fraction < 1 (documented
// large-dataset fallback); keeps at least one link.
inline std::vector<std::size_t> test_subset(std::size_t n, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (fraction >= 1.0) return idx;
  const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                 std::llround(fraction * static_cast<double>(n))));
  seeded_shuffle(idx, mix64(seed ^ 0x7E57F4AC));
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

/// One full protocol run on an already-normalized graph: per repeat, split the
/// weights, build per-link samples against the train view, fit the method,
/// and score RMSE on the held-out links. Failed repeats are recorded and
/// skipped in the aggregates.
inline EvalReport run_experiment(const WeightedGraph& normalized, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction <= 1.0))
    throw std::invalid_argument("test_fraction must be in (0,1]");

  ExperimentConfig effective = cfg;
  if (effective.epochs <= 0) effective.epochs = default_epochs(normalized.edge_count());

  EvalReport report;
  report.config = effective;
  report.nodes = static_cast<std::size_t>(normalized.node_count());
  report.edges = normalized.edge_count();

  const bool gcn_method =
      effective.method == Method::Lglwp || effective.method == Method::LglwpRandomLabel;

  for (int r = 0; r < effective.repeats; ++r) {
    RunResult run;
    run.run = r;
    run.seed = effective.seed + static_cast<std::uint64_t>(r);
    try {
      SplitSpec split_spec;
      split_spec.train_ratio = effective.train_ratio;
      split_spec.seed = run.seed;
      split_spec.repeats = effective.repeats;
      const WeightSplit split = split_train_test(normalized, split_spec);
      const WeightedGraph view =
          WeightedGraph::from_edges(normalized.node_count(), split.train_edges, normalized.names());

      const auto test_idx =
          detail::test_subset(split.test_edges.size(), effective.test_fraction, run.seed);
      for (const auto i : test_idx) {
        const Edge& e = split.test_edges[i];
        run.test_edges.emplace_back(normalized.names()[static_cast<std::size_t>(e.u)],
                                    normalized.names()[static_cast<std::size_t>(e.v)]);
      }

      std::vector<double> truth;
      truth.reserve(test_idx.size());
      for (const auto i : test_idx) truth.push_back(split.test_edges[i].w);

      if (gcn_method) {
        std::vector<LinkSample> train_samples(split.train_edges.size());
        parallel_for(split.train_edges.size(), [&](std::size_t i) {
          const Edge& e = split.train_edges[i];
          train_samples[i] = build_link_sample(view, e.u, e.v, e.w, effective, run.seed);
        });
        std::vector<LinkSample> test_samples(test_idx.size());
        parallel_for(test_idx.size(), [&](std::size_t i) {
          const Edge& e = split.test_edges[test_idx[i]];
          test_samples[i] = build_link_sample(view, e.u, e.v, std::nullopt, effective, run.seed);
        });
        verify_no_test_leak(train_samples, split.test_edges, effective.max_nodes);
        verify_no_test_leak(test_samples, split.test_edges, effective.max_nodes);

        TrainConfig tc;
        tc.epochs = effective.epochs;
        tc.batch_size = effective.batch_size;
        tc.learning_rate = effective.learning_rate;
        tc.seed = run.seed;
        tc.optimizer = effective.optimizer;
        std::vector<LineGraphSample> train_lg;
        train_lg.reserve(train_samples.size());
        for (auto& s : train_samples) train_lg.push_back(std::move(s.lg));
        const TrainResult trained = train(train_lg, tc);
        run.loss_curve = trained.loss_curve;

        std::vector<LineGraphSample> test_lg;
        test_lg.reserve(test_samples.size());
        for (auto& s : test_samples) test_lg.push_back(std::move(s.lg));
        const std::vector<double> pred = predict(test_lg, trained.params);
        run.rmse = rmse(pred, truth);

        if (effective.save_models && !effective.output_path.empty()) {
          std::filesystem::create_directories(effective.output_path);
          std::ofstream out(std::filesystem::path(effective.output_path) /
                            ("model_run" + std::to_string(r) + ".json"));
          nlohmann::json meta;
          meta["seed"] = run.seed;
          meta["method"] = method_name(effective.method);
          meta["epochs"] = effective.epochs;
          save_params(trained.params, out, meta);
        }
      } else {
        std::vector<std::pair<double, double>> train_pairs;
        train_pairs.reserve(split.train_edges.size());
        for (const Edge& e : split.train_edges)
          train_pairs.emplace_back(detail::heuristic_score_for(effective.method, view, e.u, e.v),
                                   e.w);
        std::vector<double> test_scores;
        test_scores.reserve(test_idx.size());
        for (const auto i : test_idx) {
          const Edge& e = split.test_edges[i];
          test_scores.push_back(detail::heuristic_score_for(effective.method, view, e.u, e.v));
        }
        const std::vector<double> pred = calibrate_and_predict(test_scores, train_pairs);
        run.rmse = rmse(pred, truth);
      }
    } catch (const std::exception& ex) {
      run.status = std::string("failed: ") + ex.what();
      ++report.failed_runs;
    }
    report.runs.push_back(std::move(run));
  }

  for (const RunResult& run : report.runs)
    if (run.status == "ok") report.per_run_rmse.push_back(run.rmse);
  report.mean_rmse = detail::mean_of(report.per_run_rmse);
  report.std_rmse = detail::sample_std(report.per_run_rmse, report.mean_rmse);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// File-based entry point: parses, normalizes, runs, and (when output_path is
/// set) persists report.json, loss_curves.csv, id_map.json, and splits.json.
EvalReport run_experiment(const ExperimentConfig& cfg);

/// Paired comparison of weighted-WL vs random labeling on identical splits.
struct AblationReport {
  EvalReport weighted;
  EvalReport random;
  std::vector<double> per_run_delta;  // random - weighted, paired by run
  double delta_mean = 0.0;
};

inline AblationReport run_ablation(const WeightedGraph& normalized, const ExperimentConfig& cfg) {
  AblationReport ab;
  ExperimentConfig wcfg = cfg;
  wcfg.method = Method::Lglwp;
  ExperimentConfig rcfg = cfg;
  rcfg.method = Method::LglwpRandomLabel;
  ab.weighted = run_experiment(normalized, wcfg);
  ab.random = run_experiment(normalized, rcfg);
  for (std::size_t i = 0; i < ab.weighted.runs.size() && i < ab.random.runs.size(); ++i) {
    if (ab.weighted.runs[i].status == "ok" && ab.random.runs[i].status == "ok")
      ab.per_run_delta.push_back(ab.random.runs[i].rmse - ab.weighted.runs[i].rmse);
  }
  ab.delta_mean = detail::mean_of(ab.per_run_delta);
  return ab;
}

AblationReport run_ablation(const ExperimentConfig& cfg);

// ---- report serialization ----

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["dataset_path"] = cfg.dataset_path;
  j["train_ratio"] = cfg.train_ratio;
  j["repeats"] = cfg.repeats;
  j["epochs"] = cfg.epochs;
  j["method"] = method_name(cfg.method);
  j["seed"] = cfg.seed;
  j["max_nodes"] = cfg.max_nodes;
  j["hop"] = cfg.hop;
  j["output_path"] = cfg.output_path;
  j["dup_policy"] = cfg.dup_policy == DupPolicy::Last ? "last"
                    : cfg.dup_policy == DupPolicy::Max ? "max"
                                                       : "sum";
  j["dist_mode"] = cfg.dist_mode == DistanceMode::Weight ? "weight" : "inverse-weight";
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["optimizer"] = cfg.optimizer == Optimizer::Adam ? "adam" : "sgd";
  j["test_fraction"] = cfg.test_fraction;
  j["save_models"] = cfg.save_models;
  return j;
}

inline nlohmann::json report_json(const EvalReport& report, bool with_wall_time = true) {
  nlohmann::json j;
  j["config"] = config_json(report.config);
  j["nodes"] = report.nodes;
  j["edges"] = report.edges;
  j["per_run_rmse"] = report.per_run_rmse;
  j["mean_rmse"] = report.mean_rmse;
  j["std_rmse"] = report.std_rmse;
  j["std_convention"] = "sample (n-1)";
  j["failed_runs"] = report.failed_runs;
  j["runs"] = nlohmann::json::array();
  for (const RunResult& run : report.runs) {
    nlohmann::json rj;
    rj["run"] = run.run;
    rj["seed"] = run.seed;
    rj["status"] = run.status;
    if (run.status == "ok") rj["rmse"] = run.rmse;
    if (!run.loss_curve.empty()) rj["loss_curve"] = run.loss_curve;
    j["runs"].push_back(rj);
  }
  if (with_wall_time) j["wall_time_seconds"] = report.wall_time_seconds;
  return j;
}

inline std::string loss_curves_csv(const EvalReport& report) {
  std::string csv = "run,epoch,train_rmse\n";
  for (const RunResult& run : report.runs) {
    for (std::size_t e = 0; e < run.loss_curve.size(); ++e) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g\n", run.run, e + 1, run.loss_curve[e]);
      csv += buf;
    }
  }
  return csv;
}

inline nlohmann::json splits_json(const EvalReport& report) {
  nlohmann::json j;
  j["runs"] = nlohmann::json::array();
  for (const RunResult& run : report.runs) {
    nlohmann::json rj;
    rj["run"] = run.run;
    rj["seed"] = run.seed;
    rj["test_edges"] = nlohmann::json::array();
    for (const auto& [a, b] : run.test_edges) rj["test_edges"].push_back({a, b});
    j["runs"].push_back(rj);
  }
  return j;
}

inline void write_report_files(const EvalReport& report, const WeightedGraph& g,
                               const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.json");
    out << report_json(report).dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "loss_curves.csv");
    out << loss_curves_csv(report);
  }
  {
    std::ofstream out(fs::path(dir) / "id_map.json");
    out << id_map_json(g).dump(2) << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "splits.json");
    out << splits_json(report).dump(2) << '\n';
  }
}

inline nlohmann::json ablation_json(const AblationReport& ab, bool with_wall_time = true) {
  nlohmann::json j;
  j["weighted"] = report_json(ab.weighted, with_wall_time);
  j["random"] = report_json(ab.random, with_wall_time);
  j["per_run_delta_random_minus_weighted"] = ab.per_run_delta;
  j["delta_mean"] = ab.delta_mean;
  return j;
}

inline EvalReport run_experiment(const ExperimentConfig& cfg) {
  const WeightedGraph raw = parse_edge_list_file(cfg.dataset_path, cfg.dup_policy);
  const WeightedGraph normalized = normalize_weights(raw);
  EvalReport report = run_experiment(normalized, cfg);
  if (!cfg.output_path.empty()) write_report_files(report, normalized, cfg.output_path);
  return report;
}

inline AblationReport run_ablation(const ExperimentConfig& cfg) {
  const WeightedGraph raw = parse_edge_list_file(cfg.dataset_path, cfg.dup_policy);
  const WeightedGraph normalized = normalize_weights(raw);
  AblationReport ab = run_ablation(normalized, cfg);
  if (!cfg.output_path.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_path);
    std::ofstream out(fs::path(cfg.output_path) / "ablation.json");
    out << ablation_json(ab).dump(2) << '\n';
    write_report_files(ab.weighted, normalized, (fs::path(cfg.output_path) / "weighted").string());
    write_report_files(ab.random, normalized, (fs::path(cfg.output_path) / "random").string());
  }
  return ab;
}

// ---- finite-difference gradient audit ----

struct GradcheckResult {
  int checks = 0;
  int failures = 0;
  double worst_rel_error = 0.0;
  std::vector<std::string> failure_details;
  bool passed() const { return failures == 0 && checks > 0; }
};

/// Builds random small pipelines (graph -> subgraph -> ordering -> line graph)
/// and compares every analytic parameter gradient against central finite
/// differences of the squared-error loss.
inline GradcheckResult run_gradcheck(int checks = 20, std::uint64_t seed = 2024,
                                     double step = 1e-5, double rel_tol = 1e-4,
                                     double abs_floor = 1e-7) {
  GradcheckResult result;
  std::mt19937_64 rng(mix64(seed));
  for (int check = 0; check < checks; ++check) {
    // Random connected-ish weighted graph on 5..9 nodes.
    const int n = 5 + static_cast<int>(rng() % 5);
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (u + 1 == v || uniform01(rng) < 0.45)
          edges.push_back({u, v, 0.05 + 0.9 * uniform01(rng)});
    const WeightedGraph g = WeightedGraph::from_edges(n, std::move(edges));
    const int v1 = 0;
    const int v2 = 1 + static_cast<int>(rng() % (n - 1));

    const EnclosingSubgraph sg = extract_enclosing_subgraph(g, v1, v2, 1, 10, rng());
    const NodeOrdering ord = order_nodes_wwl(sg);
    const OrderedFeatureMatrix fm = build_feature_matrix(sg, ord, 10);
    LineGraphSample sample = to_line_graph(sg, fm, ord);
    const double y = 0.1 + 0.8 * uniform01(rng);
    sample.label = y;

    ModelParams params = ModelParams::glorot(static_cast<int>(sample.features.cols()), rng(), 8, 6);
    const Eigen::MatrixXd hat = normalize_adjacency(sample.lg_adjacency);

    ForwardCache cache;
    gcn_forward(sample, hat, params, &cache);
    ModelParams analytic = backward(sample, hat, params, cache, y);

    auto loss_at = [&]() {
      const double p = gcn_forward(sample, hat, params);
      return (p - y) * (p - y);
    };

    ++result.checks;
    bool ok = true;
    auto prefs = params.tensors();
    auto grefs = analytic.tensors();
    for (std::size_t ti = 0; ti < prefs.size() && ok; ++ti) {
      for (Eigen::Index j = 0; j < prefs[ti].size; ++j) {
        const double saved = prefs[ti].data[j];
        prefs[ti].data[j] = saved + step;
        const double up = loss_at();
        prefs[ti].data[j] = saved - step;
        const double dn = loss_at();
        prefs[ti].data[j] = saved;
        const double fd = (up - dn) / (2.0 * step);
        const double an = grefs[ti].data[j];
        const double err = std::abs(fd - an);
        const double scale = std::max(std::abs(fd), std::abs(an));
        const double rel = scale > 0.0 ? err / scale : 0.0;
        if (err > abs_floor) result.worst_rel_error = std::max(result.worst_rel_error, rel);
        if (err > abs_floor && rel > rel_tol) {
          ok = false;
          char buf[160];
          std::snprintf(buf, sizeof(buf),
                        "check %d tensor %s[%lld]: analytic %.6g vs fd %.6g (rel %.3g)", check,
                        prefs[ti].name, static_cast<long long>(j), an, fd, rel);
          result.failure_details.emplace_back(buf);
          break;
        }
      }
    }
    if (!ok) ++result.failures;
  }
  return result;
}

}  // namespace lwp
