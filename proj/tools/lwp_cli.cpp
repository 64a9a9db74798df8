// Command-line front end: dataset-scale experiments, the labeling ablation,
// the gradient audit, and the synthetic benchmark generator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lwp/experiment.hpp"
#include "lwp/synth.hpp"

namespace {

struct CommonFlags {
  std::string dataset;
  std::string method = "lglwp";
  double train_ratio = 0.9;
  int repeats = 10;
  int epochs = 0;
  std::uint64_t seed = 42;
  int max_nodes = 10;
  int hop = 1;
  std::string out_dir;
  std::string dup_policy = "max";
  std::string dist = "weight";
  int batch_size = 32;
  double learning_rate = 1e-3;
  double test_fraction = 1.0;
  bool save_models = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_method) {
  cmd->add_option("--dataset", f.dataset, "edge-list file (u v w per line)")->required();
  if (with_method)
    cmd->add_option("--method", f.method,
                    "lglwp | lglwp_random_label | wcn | waa | wra");
  cmd->add_option("--train-ratio", f.train_ratio, "fraction of link weights observed");
  cmd->add_option("--repeats", f.repeats, "independent split repetitions");
  cmd->add_option("--epochs", f.epochs, "training epochs (0 = size-based default)");
  cmd->add_option("--seed", f.seed, "base random seed");
  cmd->add_option("--max-nodes", f.max_nodes, "subgraph node budget");
  cmd->add_option("--hop", f.hop, "enclosing-subgraph hop radius");
  cmd->add_option("--out", f.out_dir, "output directory for reports");
  cmd->add_option("--dup-policy", f.dup_policy, "duplicate edge lines: last | max | sum");
  cmd->add_option("--dist", f.dist, "shortest-path edge length: weight | inverse-weight");
  cmd->add_option("--batch-size", f.batch_size, "mini-batch size");
  cmd->add_option("--learning-rate", f.learning_rate, "optimizer step size");
  cmd->add_option("--test-fraction", f.test_fraction,
                  "evaluate on this seeded fraction of test links");
  cmd->add_flag("--save-models", f.save_models, "write per-run model checkpoints");
}

lwp::ExperimentConfig to_config(const CommonFlags& f) {
  lwp::ExperimentConfig cfg;
  cfg.dataset_path = f.dataset;
  cfg.method = lwp::parse_method(f.method);
  cfg.train_ratio = f.train_ratio;
  cfg.repeats = f.repeats;
  cfg.epochs = f.epochs;
  cfg.seed = f.seed;
  cfg.max_nodes = f.max_nodes;
  cfg.hop = f.hop;
  cfg.output_path = f.out_dir;
  if (f.dup_policy == "last") cfg.dup_policy = lwp::DupPolicy::Last;
  else if (f.dup_policy == "max") cfg.dup_policy = lwp::DupPolicy::Max;
  else if (f.dup_policy == "sum") cfg.dup_policy = lwp::DupPolicy::Sum;
  else throw CLI::ValidationError("--dup-policy must be last, max, or sum");
  if (f.dist == "weight") cfg.dist_mode = lwp::DistanceMode::Weight;
  else if (f.dist == "inverse-weight") cfg.dist_mode = lwp::DistanceMode::InverseWeight;
  else throw CLI::ValidationError("--dist must be weight or inverse-weight");
  cfg.batch_size = f.batch_size;
  cfg.learning_rate = f.learning_rate;
  cfg.test_fraction = f.test_fraction;
  cfg.save_models = f.save_models;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link weight prediction: enclosing-subgraph line-graph GCN and weighted heuristics"};
  app.require_subcommand(1);

  CommonFlags predict_flags;
  CLI::App* predict = app.add_subcommand("predict", "run one method over repeated splits");
  add_common_flags(predict, predict_flags, true);

  CommonFlags ablate_flags;
  CLI::App* ablate =
      app.add_subcommand("ablate", "paired weighted-WL vs random labeling comparison");
  add_common_flags(ablate, ablate_flags, false);

  int gc_checks = 20;
  std::uint64_t gc_seed = 2024;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
  gradcheck->add_option("--checks", gc_checks, "number of random configurations");
  gradcheck->add_option("--seed", gc_seed, "random seed");

  std::string synth_preset_name;
  std::string synth_out;
  std::uint64_t synth_seed = 7;
  lwp::SynthSpec synth_spec;
  CLI::App* synth = app.add_subcommand("synth", "generate a benchmark-scale weighted graph");
  synth->add_option("--preset", synth_preset_name,
                    "neural | celegans | netscience | pblog | ucsocial | condmat");
  synth->add_option("--nodes", synth_spec.nodes, "node count (when no preset)");
  synth->add_option("--edges", synth_spec.edges, "edge count (when no preset)");
  synth->add_option("--w-min", synth_spec.w_min, "minimum weight");
  synth->add_option("--w-max", synth_spec.w_max, "maximum weight");
  synth->add_flag("--integer-weights", synth_spec.integer_weights, "round weights to integers");
  synth->add_option("--noise", synth_spec.noise_sigma, "lognormal noise sigma");
  synth->add_option("--triad", synth_spec.triad_prob, "triadic closure probability");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output edge-list path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (predict->parsed()) {
      const lwp::EvalReport report = lwp::run_experiment(to_config(predict_flags));
      std::printf("method=%s dataset=%s repeats=%d\n", lwp::method_name(report.config.method),
                  report.config.dataset_path.c_str(), report.config.repeats);
      std::printf("mean RMSE = %.6f +- %.6f (%d failed runs)\n", report.mean_rmse,
                  report.std_rmse, report.failed_runs);
      if (!predict_flags.out_dir.empty())
        std::printf("report written to %s\n", predict_flags.out_dir.c_str());
      return report.failed_runs == report.config.repeats ? 1 : 0;
    }
    if (ablate->parsed()) {
      const lwp::AblationReport ab = lwp::run_ablation(to_config(ablate_flags));
      std::printf("weighted labeling: mean RMSE = %.6f +- %.6f\n", ab.weighted.mean_rmse,
                  ab.weighted.std_rmse);
      std::printf("random labeling:   mean RMSE = %.6f +- %.6f\n", ab.random.mean_rmse,
                  ab.random.std_rmse);
      std::printf("paired delta (random - weighted) = %.6f\n", ab.delta_mean);
      return 0;
    }
    if (gradcheck->parsed()) {
      const lwp::GradcheckResult result = lwp::run_gradcheck(gc_checks, gc_seed);
      std::printf("gradcheck: %d/%d passed, worst relative error %.3g\n",
                  result.checks - result.failures, result.checks, result.worst_rel_error);
      for (const auto& detail : result.failure_details) std::printf("  %s\n", detail.c_str());
      return result.passed() ? 0 : 1;
    }
    if (synth->parsed()) {
      lwp::SynthSpec spec = synth_spec;
      if (!synth_preset_name.empty()) spec = lwp::synth_preset(synth_preset_name, synth_seed);
      else spec.seed = synth_seed;
      const lwp::WeightedGraph g = lwp::synth_weighted_graph(spec);
      std::ofstream out(synth_out);
      if (!out) throw std::runtime_error("cannot open output file: " + synth_out);
      out << "# synthetic weighted graph (" << spec.name << "), nodes=" << g.node_count()
          << " edges=" << g.edge_count() << " seed=" << spec.seed << "\n";
      lwp::write_edge_list(g, out);
      std::printf("wrote %s: %d nodes, %zu edges\n", synth_out.c_str(), g.node_count(),
                  g.edge_count());
      return 0;
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 0;
}
