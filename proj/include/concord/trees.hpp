#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "concord/dataset.hpp"
#include "concord/error.hpp"
#include "concord/linear.hpp"

namespace concord {

/// A node is a leaf when feature < 0; otherwise it routes x[feature] < threshold
/// to left and everything else to right.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_weight = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  std::size_t leaf_index(std::span<const double> x) const {
    std::size_t idx = 0;
    while (!nodes[idx].is_leaf()) {
      const TreeNode& node = nodes[idx];
      idx = x[static_cast<std::size_t>(node.feature)] < node.threshold
                ? static_cast<std::size_t>(node.left)
                : static_cast<std::size_t>(node.right);
    }
    return idx;
  }

  double eval(std::span<const double> x) const { return nodes[leaf_index(x)].leaf_weight; }
};

struct TreeEnsemble {
  std::vector<Tree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;  // initial log-odds, clipped to [-10, 10]
  double reg_lambda = 1.0;
  std::size_t n_features = 0;
};

namespace detail {

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Exact greedy search over every feature and every midpoint between distinct
// sorted values. Ties keep the first candidate (lowest feature, then lowest
// threshold), which makes training fully deterministic.
inline SplitChoice best_split(const Matrix& rows, const Vector& grad, const Vector& hess,
                              const std::vector<std::size_t>& samples, double reg_lambda) {
  SplitChoice best;
  if (samples.size() < 2) return best;

  double g_total = 0.0, h_total = 0.0;
  for (std::size_t i : samples) {
    g_total += grad[i];
    h_total += hess[i];
  }
  const double parent_score = g_total * g_total / (h_total + reg_lambda);
  const std::size_t d = rows[0].size();

  std::vector<std::pair<double, std::size_t>> order(samples.size());
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t k = 0; k < samples.size(); ++k)
      order[k] = {rows[samples[k]][f], samples[k]};
    std::sort(order.begin(), order.end());

    double g_left = 0.0, h_left = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      g_left += grad[order[k].second];
      h_left += hess[order[k].second];
      if (order[k].first == order[k + 1].first) continue;
      const double g_right = g_total - g_left;
      const double h_right = h_total - h_left;
      const double gain = 0.5 * (g_left * g_left / (h_left + reg_lambda) +
                                 g_right * g_right / (h_right + reg_lambda) - parent_score);
      if (gain > best.gain + 1e-15) {
        best.found = true;
        best.feature = f;
        best.threshold = 0.5 * (order[k].first + order[k + 1].first);
        best.gain = gain;
      }
    }
  }
  // Numerical floor: a gain this small is indistinguishable from zero.
  if (best.found && best.gain <= 1e-12) best.found = false;
  return best;
}

inline int grow_tree(Tree& tree, const Matrix& rows, const Vector& grad, const Vector& hess,
                     std::vector<std::size_t>&& samples, std::size_t depth,
                     std::size_t max_depth, double reg_lambda) {
  double g = 0.0, h = 0.0;
  for (std::size_t i : samples) {
    g += grad[i];
    h += hess[i];
  }

  const int node_id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  SplitChoice split;
  if (depth < max_depth) split = best_split(rows, grad, hess, samples, reg_lambda);
  if (!split.found) {
    tree.nodes[node_id].leaf_weight = -g / (h + reg_lambda);
    return node_id;
  }

  std::vector<std::size_t> left, right;
  for (std::size_t i : samples)
    (rows[i][split.feature] < split.threshold ? left : right).push_back(i);
  samples.clear();

  tree.nodes[node_id].feature = static_cast<int>(split.feature);
  tree.nodes[node_id].threshold = split.threshold;
  tree.nodes[node_id].left =
      grow_tree(tree, rows, grad, hess, std::move(left), depth + 1, max_depth, reg_lambda);
  tree.nodes[node_id].right =
      grow_tree(tree, rows, grad, hess, std::move(right), depth + 1, max_depth, reg_lambda);
  return node_id;
}

}  // namespace detail

/// Second-order boosting: each round fits a regression tree to the logloss
/// gradients g_i = p_i - y_i and hessians h_i = p_i(1 - p_i), with leaf
/// weights -G/(H + reg_lambda) and gain-based exact greedy splits.
inline TreeEnsemble train_gbt(const Dataset& data, std::size_t rounds, std::size_t max_depth,
                              const TrainConfig& cfg = {}, double learning_rate = 0.1,
                              double reg_lambda = 1.0) {
  (void)cfg;
  if (data.n_rows() == 0) throw Error("cannot train on an empty dataset");
  const std::size_t n = data.n_rows();

  double label_mean = 0.0;
  for (int y : data.labels) label_mean += y;
  label_mean /= static_cast<double>(n);
  const double p0 = std::clamp(label_mean, 1e-12, 1.0 - 1e-12);

  TreeEnsemble model;
  model.learning_rate = learning_rate;
  model.reg_lambda = reg_lambda;
  model.n_features = data.n_features();
  model.base_score = std::clamp(std::log(p0 / (1.0 - p0)), -10.0, 10.0);

  Vector score(n, model.base_score);
  Vector grad(n), hess(n);
  for (std::size_t round = 0; round < rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid_value(score[i]);
      grad[i] = p - data.labels[i];
      hess[i] = p * (1.0 - p);
    }
    Tree tree;
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    detail::grow_tree(tree, data.rows, grad, hess, std::move(all), 0, max_depth, reg_lambda);
    for (std::size_t i = 0; i < n; ++i)
      score[i] += learning_rate * tree.eval(data.rows[i]);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace concord
