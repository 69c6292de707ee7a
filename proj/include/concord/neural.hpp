#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "concord/dataset.hpp"
#include "concord/error.hpp"
#include "concord/linear.hpp"
#include "concord/rng.hpp"

namespace concord {

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
};

/// Single-channel 1-D convolution, stride 1, valid padding. Output is
/// filter-major: out[f * T + t] with T = in_len - width + 1.
struct Conv1DLayer {
  Matrix kernels;  // filters x width
  Vector bias;     // filters
};

struct ReluLayer {};

using Layer = std::variant<DenseLayer, Conv1DLayer, ReluLayer>;

struct NeuralNet {
  std::vector<Layer> layers;
  std::size_t n_features = 0;
};

/// Architecture element used by the builder; dims are inferred left to right.
struct LayerSpec {
  enum class Kind { dense, conv1d, relu } kind = Kind::dense;
  std::size_t units = 0;    // dense
  std::size_t filters = 0;  // conv1d
  std::size_t width = 0;    // conv1d kernel width

  static LayerSpec dense(std::size_t units) { return {Kind::dense, units, 0, 0}; }
  static LayerSpec conv1d(std::size_t filters, std::size_t width) {
    return {Kind::conv1d, 0, filters, width};
  }
  static LayerSpec relu() { return {Kind::relu, 0, 0, 0}; }
};

inline std::size_t layer_output_size(const Layer& layer, std::size_t in_len) {
  if (const auto* dense = std::get_if<DenseLayer>(&layer)) return dense->weights.size();
  if (const auto* conv = std::get_if<Conv1DLayer>(&layer)) {
    const std::size_t width = conv->kernels.empty() ? 0 : conv->kernels[0].size();
    if (width == 0 || width > in_len)
      throw Error("conv1d kernel width " + std::to_string(width) +
                  " incompatible with input length " + std::to_string(in_len));
    return conv->kernels.size() * (in_len - width + 1);
  }
  return in_len;  // relu
}

/// Build a zero-initialized network from an architecture list; validates that
/// dimensions chain and that the final layer emits exactly one scalar.
inline NeuralNet build_network(std::size_t n_features, const std::vector<LayerSpec>& arch) {
  if (arch.empty()) throw Error("network architecture is empty");
  NeuralNet net;
  net.n_features = n_features;
  std::size_t len = n_features;
  for (const auto& spec : arch) {
    switch (spec.kind) {
      case LayerSpec::Kind::dense: {
        if (spec.units == 0) throw Error("dense layer must have at least one unit");
        DenseLayer dense;
        dense.weights.assign(spec.units, Vector(len, 0.0));
        dense.bias.assign(spec.units, 0.0);
        net.layers.emplace_back(std::move(dense));
        len = spec.units;
        break;
      }
      case LayerSpec::Kind::conv1d: {
        if (spec.filters == 0 || spec.width == 0)
          throw Error("conv1d layer must have filters >= 1 and width >= 1");
        if (spec.width > len)
          throw Error("conv1d width " + std::to_string(spec.width) +
                      " exceeds input length " + std::to_string(len));
        Conv1DLayer conv;
        conv.kernels.assign(spec.filters, Vector(spec.width, 0.0));
        conv.bias.assign(spec.filters, 0.0);
        net.layers.emplace_back(std::move(conv));
        len = spec.filters * (len - spec.width + 1);
        break;
      }
      case LayerSpec::Kind::relu:
        net.layers.emplace_back(ReluLayer{});
        break;
    }
  }
  if (len != 1) throw Error("network must end in a single raw-score output");
  return net;
}

/// Seeded init: weights uniform in +-1/sqrt(fan_in), biases zero. Fan-in is
/// the input width for dense layers and the kernel width for conv filters.
/// Draw order is layer by layer, row-major within each weight matrix.
inline void init_network(NeuralNet& net, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : net.layers) {
    if (auto* dense = std::get_if<DenseLayer>(&layer)) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(dense->weights[0].size()));
      for (auto& row : dense->weights)
        for (auto& w : row) w = rng.uniform(-bound, bound);
    } else if (auto* conv = std::get_if<Conv1DLayer>(&layer)) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(conv->kernels[0].size()));
      for (auto& kernel : conv->kernels)
        for (auto& w : kernel) w = rng.uniform(-bound, bound);
    }
  }
}

/// Activations after each layer, with the (possibly clamped) input at index 0.
inline std::vector<Vector> forward_activations(const NeuralNet& net, std::span<const double> x) {
  if (x.size() != net.n_features) throw Error("input dimension mismatch");
  std::vector<Vector> acts;
  acts.reserve(net.layers.size() + 1);
  acts.emplace_back(x.begin(), x.end());
  for (const auto& layer : net.layers) {
    const Vector& in = acts.back();
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      Vector out(dense->weights.size());
      for (std::size_t j = 0; j < out.size(); ++j) {
        double s = dense->bias[j];
        const Vector& row = dense->weights[j];
        for (std::size_t i = 0; i < in.size(); ++i) s += row[i] * in[i];
        out[j] = s;
      }
      acts.push_back(std::move(out));
    } else if (const auto* conv = std::get_if<Conv1DLayer>(&layer)) {
      const std::size_t width = conv->kernels[0].size();
      const std::size_t t_len = in.size() - width + 1;
      Vector out(conv->kernels.size() * t_len);
      for (std::size_t f = 0; f < conv->kernels.size(); ++f)
        for (std::size_t t = 0; t < t_len; ++t) {
          double s = conv->bias[f];
          for (std::size_t k = 0; k < width; ++k) s += conv->kernels[f][k] * in[t + k];
          out[f * t_len + t] = s;
        }
      acts.push_back(std::move(out));
    } else {
      Vector out(in.size());
      for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::max(in[i], 0.0);
      acts.push_back(std::move(out));
    }
  }
  if (acts.back().size() != 1) throw Error("network output is not a single scalar");
  return acts;
}

inline double network_raw_score(const NeuralNet& net, std::span<const double> x) {
  return forward_activations(net, x).back()[0];
}

namespace detail {

inline NeuralNet zeros_like(const NeuralNet& net) {
  NeuralNet out = net;
  for (auto& layer : out.layers) {
    if (auto* dense = std::get_if<DenseLayer>(&layer)) {
      for (auto& row : dense->weights) std::fill(row.begin(), row.end(), 0.0);
      std::fill(dense->bias.begin(), dense->bias.end(), 0.0);
    } else if (auto* conv = std::get_if<Conv1DLayer>(&layer)) {
      for (auto& kernel : conv->kernels) std::fill(kernel.begin(), kernel.end(), 0.0);
      std::fill(conv->bias.begin(), conv->bias.end(), 0.0);
    }
  }
  return out;
}

// Backprop one sample given its stored activations; dL/d(raw score) enters as
// output_grad and parameter gradients accumulate into grads (same shape).
inline void backprop_sample(const NeuralNet& net, const std::vector<Vector>& acts,
                            double output_grad, NeuralNet& grads) {
  Vector grad_out(1, output_grad);
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const Vector& in = acts[li];
    Vector grad_in(in.size(), 0.0);
    if (const auto* dense = std::get_if<DenseLayer>(&net.layers[li])) {
      auto& g = std::get<DenseLayer>(grads.layers[li]);
      for (std::size_t j = 0; j < dense->weights.size(); ++j) {
        const double gj = grad_out[j];
        if (gj == 0.0) continue;
        g.bias[j] += gj;
        const Vector& row = dense->weights[j];
        Vector& grow = g.weights[j];
        for (std::size_t i = 0; i < in.size(); ++i) {
          grow[i] += gj * in[i];
          grad_in[i] += gj * row[i];
        }
      }
    } else if (const auto* conv = std::get_if<Conv1DLayer>(&net.layers[li])) {
      auto& g = std::get<Conv1DLayer>(grads.layers[li]);
      const std::size_t width = conv->kernels[0].size();
      const std::size_t t_len = in.size() - width + 1;
      for (std::size_t f = 0; f < conv->kernels.size(); ++f)
        for (std::size_t t = 0; t < t_len; ++t) {
          const double gj = grad_out[f * t_len + t];
          if (gj == 0.0) continue;
          g.bias[f] += gj;
          for (std::size_t k = 0; k < width; ++k) {
            g.kernels[f][k] += gj * in[t + k];
            grad_in[t + k] += gj * conv->kernels[f][k];
          }
        }
    } else {
      for (std::size_t i = 0; i < in.size(); ++i)
        grad_in[i] = in[i] > 0.0 ? grad_out[i] : 0.0;
    }
    grad_out.swap(grad_in);
  }
}

}  // namespace detail

/// Visit every parameter of `net` paired with the same-position parameter of
/// `other` in a fixed order. Used for SGD updates and finite-difference probes.
inline void for_each_param_pair(NeuralNet& net, NeuralNet& other,
                                const std::function<void(double&, double&)>& fn) {
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    if (auto* dense = std::get_if<DenseLayer>(&net.layers[li])) {
      auto& o = std::get<DenseLayer>(other.layers[li]);
      for (std::size_t j = 0; j < dense->weights.size(); ++j)
        for (std::size_t i = 0; i < dense->weights[j].size(); ++i)
          fn(dense->weights[j][i], o.weights[j][i]);
      for (std::size_t j = 0; j < dense->bias.size(); ++j) fn(dense->bias[j], o.bias[j]);
    } else if (auto* conv = std::get_if<Conv1DLayer>(&net.layers[li])) {
      auto& o = std::get<Conv1DLayer>(other.layers[li]);
      for (std::size_t f = 0; f < conv->kernels.size(); ++f)
        for (std::size_t k = 0; k < conv->kernels[f].size(); ++k)
          fn(conv->kernels[f][k], o.kernels[f][k]);
      for (std::size_t f = 0; f < conv->bias.size(); ++f) fn(conv->bias[f], o.bias[f]);
    }
  }
}

/// Mean cross-entropy over (rows, labels) plus its gradient w.r.t. every
/// parameter, returned as a parameter-shaped NeuralNet.
inline double loss_and_gradients(const NeuralNet& net, const Matrix& rows,
                                 const std::vector<int>& labels, NeuralNet& grads) {
  grads = detail::zeros_like(net);
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto acts = forward_activations(net, rows[i]);
    const double score = acts.back()[0];
    loss += logloss_from_score(score, labels[i]);
    const double dscore = (sigmoid_value(score) - labels[i]) * inv_n;
    detail::backprop_sample(net, acts, dscore, grads);
  }
  return loss * inv_n;
}

/// Seeded mini-batch SGD on the mean cross-entropy of sigmoid(raw score).
/// cfg.max_iterations counts epochs; the per-epoch shuffle and the weight init
/// both come from cfg.seed, so training is a pure function of (data, arch, cfg).
inline NeuralNet train_nn(const Dataset& data, const std::vector<LayerSpec>& arch,
                          const TrainConfig& cfg = {},
                          std::vector<double>* loss_trace = nullptr) {
  if (data.n_rows() == 0) throw Error("cannot train on an empty dataset");
  NeuralNet net = build_network(data.n_features(), arch);
  init_network(net, cfg.seed);

  const std::size_t n = data.n_rows();
  const std::size_t batch = std::max<std::size_t>(1, std::min(cfg.batch_size, n));
  Rng rng(derive_seed(cfg.seed, "nn-shuffle"));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  if (loss_trace) loss_trace->clear();
  Matrix batch_rows;
  std::vector<int> batch_labels;
  NeuralNet grads;
  for (std::size_t epoch = 0; epoch < cfg.max_iterations; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(start + batch, n);
      batch_rows.clear();
      batch_labels.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch_rows.push_back(data.rows[order[k]]);
        batch_labels.push_back(data.labels[order[k]]);
      }
      const double loss = loss_and_gradients(net, batch_rows, batch_labels, grads);
      if (!std::isfinite(loss)) throw Error("non-finite loss during network training");
      for_each_param_pair(net, grads, [&](double& p, double& g) { p -= cfg.step_size * g; });
    }
    if (loss_trace) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        total += logloss_from_score(network_raw_score(net, data.rows[i]), data.labels[i]);
      loss_trace->push_back(total / static_cast<double>(n));
    }
  }
  return net;
}

}  // namespace concord
