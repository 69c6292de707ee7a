#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "concord/attribution.hpp"
#include "concord/error.hpp"
#include "concord/neural.hpp"

namespace concord {

struct DtdStats {
  std::size_t clamped_values = 0;
  std::size_t negative_score_rows = 0;  // z+ redistributes a negative root relevance
};

namespace detail {

constexpr double kDtdEpsilon = 1e-9;

inline double stabilize(double denom) {
  return denom + (denom >= 0.0 ? kDtdEpsilon : -kDtdEpsilon);
}

}  // namespace detail

/// Redistributes the raw score backwards through the network. ReLU layers
/// pass relevance through unchanged; the input-consuming linear layer uses
/// the bounded z^B rule, every later dense or conv layer the z+ rule.
inline AttributionVector dtd_attribute(const NeuralNet& net, std::span<const double> x,
                                       const Vector& lower, const Vector& upper,
                                       DtdStats* stats = nullptr) {
  const std::size_t d = net.n_features;
  if (x.size() != d) throw Error("dtd: instance dimension does not match network");
  if (lower.size() != d || upper.size() != d)
    throw Error("dtd: bounds must have one entry per feature");
  for (std::size_t j = 0; j < d; ++j)
    if (!(lower[j] <= upper[j])) throw Error("dtd: lower bound exceeds upper bound");

  Vector clamped(x.begin(), x.end());
  std::size_t clamp_count = 0;
  for (std::size_t j = 0; j < d; ++j) {
    const double c = std::clamp(clamped[j], lower[j], upper[j]);
    clamp_count += c != clamped[j];
    clamped[j] = c;
  }
  if (stats) stats->clamped_values += clamp_count;

  const std::vector<Vector> acts = forward_activations(net, clamped);
  if (stats && acts.back()[0] < 0.0) ++stats->negative_score_rows;
  std::size_t first_linear = net.layers.size();
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    if (!std::holds_alternative<ReluLayer>(net.layers[li])) {
      first_linear = li;
      break;
    }
  }
  if (first_linear == net.layers.size()) throw Error("dtd: network has no linear layer");

  Vector relevance{acts.back()[0]};
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const Vector& in = acts[li];
    if (std::holds_alternative<ReluLayer>(net.layers[li])) continue;
    const bool bounded = li == first_linear;
    Vector next(in.size(), 0.0);
    if (const auto* dense = std::get_if<DenseLayer>(&net.layers[li])) {
      for (std::size_t j = 0; j < relevance.size(); ++j) {
        if (relevance[j] == 0.0) continue;
        const Vector& w = dense->weights[j];
        double denom = 0.0;
        for (std::size_t i = 0; i < in.size(); ++i) {
          const double wij = w[i];
          const double num = bounded ? in[i] * wij - lower[i] * std::max(wij, 0.0) -
                                           upper[i] * std::min(wij, 0.0)
                                     : in[i] * std::max(wij, 0.0);
          denom += num;
        }
        const double scale = relevance[j] / detail::stabilize(denom);
        for (std::size_t i = 0; i < in.size(); ++i) {
          const double wij = w[i];
          const double num = bounded ? in[i] * wij - lower[i] * std::max(wij, 0.0) -
                                           upper[i] * std::min(wij, 0.0)
                                     : in[i] * std::max(wij, 0.0);
          next[i] += num * scale;
        }
      }
    } else {
      const auto& conv = std::get<Conv1DLayer>(net.layers[li]);
      const std::size_t width = conv.kernels.empty() ? 0 : conv.kernels[0].size();
      const std::size_t out_len = in.size() - width + 1;
      for (std::size_t f = 0; f < conv.kernels.size(); ++f) {
        for (std::size_t t = 0; t < out_len; ++t) {
          const double rj = relevance[f * out_len + t];
          if (rj == 0.0) continue;
          double denom = 0.0;
          for (std::size_t k = 0; k < width; ++k) {
            const double wk = conv.kernels[f][k];
            const std::size_t i = t + k;
            const double num = bounded ? in[i] * wk - lower[i] * std::max(wk, 0.0) -
                                             upper[i] * std::min(wk, 0.0)
                                       : in[i] * std::max(wk, 0.0);
            denom += num;
          }
          const double scale = rj / detail::stabilize(denom);
          for (std::size_t k = 0; k < width; ++k) {
            const double wk = conv.kernels[f][k];
            const std::size_t i = t + k;
            const double num = bounded ? in[i] * wk - lower[i] * std::max(wk, 0.0) -
                                             upper[i] * std::min(wk, 0.0)
                                       : in[i] * std::max(wk, 0.0);
            next[i] += num * scale;
          }
        }
      }
    }
    relevance = std::move(next);
  }

  AttributionVector result;
  result.values = std::move(relevance);
  result.explained_quantity = acts.back()[0];
  return result;
}

}  // namespace concord
