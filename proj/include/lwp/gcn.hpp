#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lwp/common.hpp"
#include "lwp/line_graph.hpp"

namespace lwp {

/// Trainable tensors: three graph-convolution weight matrices followed by a
/// two-layer regression head read out at the target line node.
struct ModelParams {
  Eigen::MatrixXd w0;   // in_dim x gcn_dim
  Eigen::MatrixXd w1;   // gcn_dim x gcn_dim
  Eigen::MatrixXd w2;   // gcn_dim x gcn_dim
  Eigen::MatrixXd fc1;  // 3*gcn_dim x fc_hidden
  Eigen::VectorXd b1;   // fc_hidden
  Eigen::MatrixXd fc2;  // fc_hidden x 1
  Eigen::VectorXd b2;   // 1

  struct TensorRef {
    const char* name;
    double* data;
    Eigen::Index size;
  };

  std::vector<TensorRef> tensors() {
    return {{"w0", w0.data(), w0.size()},   {"w1", w1.data(), w1.size()},
            {"w2", w2.data(), w2.size()},   {"fc1", fc1.data(), fc1.size()},
            {"b1", b1.data(), b1.size()},   {"fc2", fc2.data(), fc2.size()},
            {"b2", b2.data(), b2.size()}};
  }

  bool all_finite() const {
    return w0.allFinite() && w1.allFinite() && w2.allFinite() && fc1.allFinite() &&
           b1.allFinite() && fc2.allFinite() && b2.allFinite();
  }

  static ModelParams zeros(int in_dim, int gcn_dim = 32, int fc_hidden = 16) {
    ModelParams p;
    p.w0 = Eigen::MatrixXd::Zero(in_dim, gcn_dim);
    p.w1 = Eigen::MatrixXd::Zero(gcn_dim, gcn_dim);
    p.w2 = Eigen::MatrixXd::Zero(gcn_dim, gcn_dim);
    p.fc1 = Eigen::MatrixXd::Zero(3 * gcn_dim, fc_hidden);
    p.b1 = Eigen::VectorXd::Zero(fc_hidden);
    p.fc2 = Eigen::MatrixXd::Zero(fc_hidden, 1);
    p.b2 = Eigen::VectorXd::Zero(1);
    return p;
  }

  /// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases, seeded.
  static ModelParams glorot(int in_dim, std::uint64_t seed, int gcn_dim = 32, int fc_hidden = 16) {
    ModelParams p = zeros(in_dim, gcn_dim, fc_hidden);
    std::mt19937_64 rng(mix64(seed));
    auto fill = [&rng](Eigen::MatrixXd& m) {
      const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          m(i, j) = (2.0 * uniform01(rng) - 1.0) * limit;
    };
    fill(p.w0);
    fill(p.w1);
    fill(p.w2);
    fill(p.fc1);
    fill(p.fc2);
    return p;
  }
};

enum class Optimizer { Adam, Sgd };

struct TrainConfig {
  int epochs = 15;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::Adam;
  int gcn_dim = 32;
  int fc_hidden = 16;
};

/// Symmetric renormalized adjacency with self-loops:
/// hat(i,j) = (A+I)(i,j) / sqrt(deg_i * deg_j), deg = rowwise sum of A+I.
inline Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("adjacency must be square");
  if (a.diagonal().cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("adjacency must have a zero diagonal");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("adjacency must be symmetric");
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd tilde = a + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd inv_sqrt_deg = tilde.rowwise().sum().cwiseSqrt().cwiseInverse();
  return inv_sqrt_deg.asDiagonal() * tilde * inv_sqrt_deg.asDiagonal();
}

/// Activations cached by the forward pass for the backward pass.
struct ForwardCache {
  Eigen::MatrixXd p0, z1, p1, z2, p2, z3;  // p_k = hat * input of layer k
  Eigen::VectorXd readout, h_pre, h;
  double out_pre = 0.0;
  double prediction = 0.0;
};

namespace detail {

inline Eigen::MatrixXd relu(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace detail

/// Three renormalized graph-convolution layers with rectifier activations; the
/// per-layer embeddings of the target line node are concatenated and passed
/// through a rectified hidden layer and a final logistic squash onto (0,1).
inline double gcn_forward(const LineGraphSample& sample, const Eigen::MatrixXd& hat,
                          const ModelParams& params, ForwardCache* cache = nullptr) {
  if (sample.features.cols() != params.w0.rows())
    throw std::invalid_argument("feature width does not match first layer");
  if (hat.rows() != sample.n_lg)
    throw std::invalid_argument("normalized adjacency size does not match sample");
  const int t = sample.target_index;
  if (t < 0 || t >= sample.n_lg) throw std::invalid_argument("target index out of range");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.p0 = hat * sample.features;
  c.z1 = detail::relu(c.p0 * params.w0);
  c.p1 = hat * c.z1;
  c.z2 = detail::relu(c.p1 * params.w1);
  c.p2 = hat * c.z2;
  c.z3 = detail::relu(c.p2 * params.w2);

  const Eigen::Index d = params.w0.cols();
  c.readout.resize(3 * d);
  c.readout.segment(0, d) = c.z1.row(t).transpose();
  c.readout.segment(d, d) = c.z2.row(t).transpose();
  c.readout.segment(2 * d, d) = c.z3.row(t).transpose();

  c.h_pre = params.fc1.transpose() * c.readout + params.b1;
  c.h = c.h_pre.cwiseMax(0.0);
  c.out_pre = (params.fc2.transpose() * c.h)(0) + params.b2(0);
  c.prediction = detail::sigmoid(c.out_pre);
  return c.prediction;
}

inline double gcn_forward(const LineGraphSample& sample, const ModelParams& params,
                          ForwardCache* cache = nullptr) {
  return gcn_forward(sample, normalize_adjacency(sample.lg_adjacency), params, cache);
}

/// Exact reverse-mode gradients of (prediction - true_weight)^2 with respect
/// to every parameter tensor, given the cached forward activations.
inline ModelParams backward(const LineGraphSample& sample, const Eigen::MatrixXd& hat,
                            const ModelParams& params, const ForwardCache& c, double true_weight) {
  const int t = sample.target_index;
  const Eigen::Index d = params.w0.cols();
  ModelParams g = ModelParams::zeros(static_cast<int>(params.w0.rows()), static_cast<int>(d),
                                     static_cast<int>(params.fc1.cols()));

  const double dpred = 2.0 * (c.prediction - true_weight);
  const double dz_out = dpred * c.prediction * (1.0 - c.prediction);

  g.b2(0) = dz_out;
  g.fc2 = c.h * dz_out;
  Eigen::VectorXd dh = params.fc2.col(0) * dz_out;
  Eigen::VectorXd dh_pre =
      (c.h_pre.array() > 0.0).select(dh.array(), 0.0).matrix();
  g.b1 = dh_pre;
  g.fc1 = c.readout * dh_pre.transpose();

  const Eigen::VectorXd dr = params.fc1 * dh_pre;

  Eigen::MatrixXd dz3 = Eigen::MatrixXd::Zero(sample.n_lg, d);
  dz3.row(t) = dr.segment(2 * d, d).transpose();
  Eigen::MatrixXd dm2 = (c.z3.array() > 0.0).select(dz3.array(), 0.0).matrix();
  g.w2 = c.p2.transpose() * dm2;

  Eigen::MatrixXd dz2 = hat * (dm2 * params.w2.transpose());
  dz2.row(t) += dr.segment(d, d).transpose();
  Eigen::MatrixXd dm1 = (c.z2.array() > 0.0).select(dz2.array(), 0.0).matrix();
  g.w1 = c.p1.transpose() * dm1;

  Eigen::MatrixXd dz1 = hat * (dm1 * params.w1.transpose());
  dz1.row(t) += dr.segment(0, d).transpose();
  Eigen::MatrixXd dm0 = (c.z1.array() > 0.0).select(dz1.array(), 0.0).matrix();
  g.w0 = c.p0.transpose() * dm0;

  return g;
}

/// Convenience overload running its own forward pass.
inline ModelParams backward(const LineGraphSample& sample, const ModelParams& params,
                            double true_weight) {
  const Eigen::MatrixXd hat = normalize_adjacency(sample.lg_adjacency);
  ForwardCache cache;
  gcn_forward(sample, hat, params, &cache);
  return backward(sample, hat, params, cache, true_weight);
}

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_curve;  // per-epoch training RMSE
};

namespace detail {

struct AdamState {
  std::vector<std::vector<double>> m, v;
  long step = 0;
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double eps = 1e-8;
};

}  // namespace detail

/// Seeded mini-batch training minimizing mean squared error; the reported
/// curve is the training RMSE recomputed by a full forward pass after each
/// epoch. Throws on non-finite loss or parameters (divergence).
inline TrainResult train(const std::vector<LineGraphSample>& samples, const TrainConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("train: no samples");
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be > 0");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  const Eigen::Index in_dim = samples[0].features.cols();
  for (const auto& s : samples) {
    if (!s.label.has_value()) throw std::invalid_argument("train: sample without label");
    if (s.features.cols() != in_dim) throw std::invalid_argument("train: inconsistent feature widths");
  }

  std::vector<Eigen::MatrixXd> hats;
  hats.reserve(samples.size());
  for (const auto& s : samples) hats.push_back(normalize_adjacency(s.lg_adjacency));

  TrainResult result;
  result.params = ModelParams::glorot(static_cast<int>(in_dim), cfg.seed, cfg.gcn_dim, cfg.fc_hidden);

  detail::AdamState adam;
  {
    auto refs = result.params.tensors();
    adam.m.resize(refs.size());
    adam.v.resize(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i) {
      adam.m[i].assign(static_cast<std::size_t>(refs[i].size), 0.0);
      adam.v[i].assign(static_cast<std::size_t>(refs[i].size), 0.0);
    }
  }

  std::vector<std::size_t> idx(samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    seeded_shuffle(idx, mix64(cfg.seed ^ (0x5EEDull + static_cast<std::uint64_t>(epoch))));

    for (std::size_t start = 0; start < idx.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(stop - start);

      ModelParams grad = ModelParams::zeros(static_cast<int>(in_dim), cfg.gcn_dim, cfg.fc_hidden);
      auto grad_refs = grad.tensors();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const auto& s = samples[idx[k]];
        ForwardCache cache;
        gcn_forward(s, hats[idx[k]], result.params, &cache);
        batch_loss += (cache.prediction - *s.label) * (cache.prediction - *s.label);
        ModelParams g = backward(s, hats[idx[k]], result.params, cache, *s.label);
        auto refs = g.tensors();
        for (std::size_t ti = 0; ti < refs.size(); ++ti)
          for (Eigen::Index j = 0; j < refs[ti].size; ++j)
            grad_refs[ti].data[j] += refs[ti].data[j];
      }
      batch_loss *= inv_batch;
      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 " (divergence)");

      auto param_refs = result.params.tensors();
      if (cfg.optimizer == Optimizer::Adam) {
        ++adam.step;
        const double bc1 = 1.0 - std::pow(detail::AdamState::beta1, static_cast<double>(adam.step));
        const double bc2 = 1.0 - std::pow(detail::AdamState::beta2, static_cast<double>(adam.step));
        for (std::size_t ti = 0; ti < param_refs.size(); ++ti) {
          for (Eigen::Index j = 0; j < param_refs[ti].size; ++j) {
            const double gj = grad_refs[ti].data[j] * inv_batch;
            auto& mj = adam.m[ti][static_cast<std::size_t>(j)];
            auto& vj = adam.v[ti][static_cast<std::size_t>(j)];
            mj = detail::AdamState::beta1 * mj + (1.0 - detail::AdamState::beta1) * gj;
            vj = detail::AdamState::beta2 * vj + (1.0 - detail::AdamState::beta2) * gj * gj;
            param_refs[ti].data[j] -=
                cfg.learning_rate * (mj / bc1) / (std::sqrt(vj / bc2) + detail::AdamState::eps);
          }
        }
      } else {
        for (std::size_t ti = 0; ti < param_refs.size(); ++ti)
          for (Eigen::Index j = 0; j < param_refs[ti].size; ++j)
            param_refs[ti].data[j] -= cfg.learning_rate * grad_refs[ti].data[j] * inv_batch;
      }
    }

    if (!result.params.all_finite())
      throw std::runtime_error("train: non-finite parameters after epoch " + std::to_string(epoch) +
                               " (divergence)");

    double sq_sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double p = gcn_forward(samples[i], hats[i], result.params);
      sq_sum += (p - *samples[i].label) * (p - *samples[i].label);
    }
    result.loss_curve.push_back(std::sqrt(sq_sum / static_cast<double>(samples.size())));
  }

  return result;
}

/// One in-(0,1) prediction per sample; parameters are untouched.
inline std::vector<double> predict(const std::vector<LineGraphSample>& samples,
                                   const ModelParams& params) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = gcn_forward(samples[i], params);
  return out;
}

/// JSON checkpoint: shapes, row-major tensor payloads, and caller metadata.
inline void save_params(const ModelParams& params, std::ostream& out,
                        const nlohmann::json& meta = nlohmann::json::object()) {
  nlohmann::json j;
  j["format"] = "lwp-gcn-checkpoint";
  j["version"] = 1;
  j["meta"] = meta;
  const Eigen::MatrixXd* mats[] = {&params.w0, &params.w1, &params.w2, &params.fc1, &params.fc2};
  const char* mat_names[] = {"w0", "w1", "w2", "fc1", "fc2"};
  for (int i = 0; i < 5; ++i) {
    j["shapes"][mat_names[i]] = {mats[i]->rows(), mats[i]->cols()};
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(mats[i]->size()));
    for (Eigen::Index r = 0; r < mats[i]->rows(); ++r)
      for (Eigen::Index c = 0; c < mats[i]->cols(); ++c) flat.push_back((*mats[i])(r, c));
    j["tensors"][mat_names[i]] = flat;
  }
  j["shapes"]["b1"] = {params.b1.size()};
  j["tensors"]["b1"] = std::vector<double>(params.b1.data(), params.b1.data() + params.b1.size());
  j["shapes"]["b2"] = {params.b2.size()};
  j["tensors"]["b2"] = std::vector<double>(params.b2.data(), params.b2.data() + params.b2.size());
  out << j.dump(2) << '\n';
}

inline ModelParams load_params(std::istream& in) {
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "lwp-gcn-checkpoint")
    throw std::runtime_error("not a model checkpoint");
  auto mat = [&j](const char* name) {
    const auto shape = j.at("shapes").at(name);
    const auto flat = j.at("tensors").at(name).get<std::vector<double>>();
    Eigen::MatrixXd m(shape.at(0).get<Eigen::Index>(), shape.at(1).get<Eigen::Index>());
    if (static_cast<Eigen::Index>(flat.size()) != m.size())
      throw std::runtime_error("checkpoint tensor size mismatch for " + std::string(name));
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat[k++];
    return m;
  };
  ModelParams p;
  p.w0 = mat("w0");
  p.w1 = mat("w1");
  p.w2 = mat("w2");
  p.fc1 = mat("fc1");
  p.fc2 = mat("fc2");
  const auto b1 = j.at("tensors").at("b1").get<std::vector<double>>();
  const auto b2 = j.at("tensors").at("b2").get<std::vector<double>>();
  p.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(), static_cast<Eigen::Index>(b1.size()));
  p.b2 = Eigen::Map<const Eigen::VectorXd>(b2.data(), static_cast<Eigen::Index>(b2.size()));
  return p;
}

}  // namespace lwp
