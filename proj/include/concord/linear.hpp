#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "concord/dataset.hpp"
#include "concord/error.hpp"

namespace concord {

/// Shared trainer knobs. step_size is the initial proximal-gradient step for
/// the lasso (backtracking shrinks it) and the SGD learning rate for the
/// network; batch_size applies to the network only.
struct TrainConfig {
  std::size_t max_iterations = 10000;
  double tolerance = 1e-8;
  double step_size = 1.0;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

struct LinearModel {
  Vector weights;
  double intercept = 0.0;
  double lambda = 0.0;
  std::optional<StandardizationParams> standardization;
};

/// logloss(s, y) for y in {0,1}, stable for large |s|.
inline double logloss_from_score(double s, int y) {
  return std::max(s, 0.0) - y * s + std::log1p(std::exp(-std::abs(s)));
}

namespace detail {

inline double linear_margin(const LinearModel& m, const Vector& x) {
  double s = m.intercept;
  for (std::size_t j = 0; j < m.weights.size(); ++j) s += m.weights[j] * x[j];
  return s;
}

inline double mean_logloss_linear(const Matrix& rows, const std::vector<int>& labels,
                                  const Vector& w, double b) {
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * rows[i][j];
    total += logloss_from_score(s, labels[i]);
  }
  return total / static_cast<double>(rows.size());
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace detail

/// L1-regularized logistic regression by proximal gradient descent with
/// backtracking line search. The intercept is unpenalized; the soft-threshold
/// step drives inactive coordinates exactly to zero. When objective_trace is
/// given it receives the full penalized objective after every iteration
/// (non-increasing by construction of the backtracking step).
inline LinearModel train_l1_logistic(const Dataset& data, double lambda,
                                     const TrainConfig& cfg = {},
                                     std::vector<double>* objective_trace = nullptr) {
  if (data.n_rows() == 0) throw Error("cannot train on an empty dataset");
  if (lambda < 0.0) throw Error("lambda must be nonnegative");
  const std::size_t n = data.n_rows();
  const std::size_t d = data.n_features();
  const double inv_n = 1.0 / static_cast<double>(n);

  double label_mean = 0.0;
  for (int y : data.labels) label_mean += y;
  label_mean *= inv_n;
  const double p0 = std::clamp(label_mean, 1e-12, 1.0 - 1e-12);

  Vector w(d, 0.0);
  double b = std::log(p0 / (1.0 - p0));

  Vector probs(n), grad(d);
  Vector w_next(d);
  double step = cfg.step_size;

  auto smooth_loss = [&](const Vector& wv, double bv) {
    return detail::mean_logloss_linear(data.rows, data.labels, wv, bv);
  };

  double f = smooth_loss(w, b);
  if (objective_trace) {
    objective_trace->clear();
    double pen = 0.0;
    for (double wj : w) pen += std::abs(wj);
    objective_trace->push_back(f + lambda * pen);
  }

  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = b;
      for (std::size_t j = 0; j < d; ++j) s += w[j] * data.rows[i][j];
      probs[i] = sigmoid_value(s);
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = probs[i] - data.labels[i];
      grad_b += r;
      for (std::size_t j = 0; j < d; ++j) grad[j] += r * data.rows[i][j];
    }
    grad_b *= inv_n;
    for (auto& g : grad) g *= inv_n;

    // Backtracking on the smooth part; the prox step handles the penalty.
    double b_next = b;
    double f_next = f;
    step = std::min(step * 2.0, cfg.step_size);
    while (true) {
      for (std::size_t j = 0; j < d; ++j)
        w_next[j] = detail::soft_threshold(w[j] - step * grad[j], step * lambda);
      b_next = b - step * grad_b;
      f_next = smooth_loss(w_next, b_next);
      if (!std::isfinite(f_next)) throw Error("non-finite loss during lasso optimization");
      double quad = (b_next - b) * (b_next - b);
      double lin = grad_b * (b_next - b);
      for (std::size_t j = 0; j < d; ++j) {
        const double delta = w_next[j] - w[j];
        quad += delta * delta;
        lin += grad[j] * delta;
      }
      if (f_next <= f + lin + quad / (2.0 * step) + 1e-15 || step < 1e-18) break;
      step *= 0.5;
    }

    double max_change = std::abs(b_next - b);
    for (std::size_t j = 0; j < d; ++j)
      max_change = std::max(max_change, std::abs(w_next[j] - w[j]));
    w.swap(w_next);
    b = b_next;
    f = f_next;
    if (objective_trace) {
      double pen = 0.0;
      for (double wj : w) pen += std::abs(wj);
      objective_trace->push_back(f + lambda * pen);
    }
    if (max_change < cfg.tolerance) break;
  }

  LinearModel model;
  model.weights = std::move(w);
  model.intercept = b;
  model.lambda = lambda;
  return model;
}

}  // namespace concord
