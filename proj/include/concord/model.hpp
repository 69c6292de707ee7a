#pragma once

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "concord/dataset.hpp"
#include "concord/error.hpp"
#include "concord/linear.hpp"
#include "concord/neural.hpp"
#include "concord/trees.hpp"

namespace concord {

using Model = std::variant<LinearModel, TreeEnsemble, NeuralNet>;

inline std::size_t model_dimension(const Model& model) {
  if (const auto* linear = std::get_if<LinearModel>(&model)) return linear->weights.size();
  if (const auto* trees = std::get_if<TreeEnsemble>(&model)) return trees->n_features;
  return std::get<NeuralNet>(model).n_features;
}

/// Pre-sigmoid log-odds margin; the quantity every explainer decomposes.
inline double raw_score(const Model& model, std::span<const double> x) {
  if (x.size() != model_dimension(model)) throw Error("raw_score: input dimension mismatch");
  if (const auto* linear = std::get_if<LinearModel>(&model)) {
    double s = linear->intercept;
    for (std::size_t j = 0; j < linear->weights.size(); ++j) s += linear->weights[j] * x[j];
    return s;
  }
  if (const auto* trees = std::get_if<TreeEnsemble>(&model)) {
    double s = trees->base_score;
    for (const auto& tree : trees->trees) s += trees->learning_rate * tree.eval(x);
    return s;
  }
  return network_raw_score(std::get<NeuralNet>(model), x);
}

inline double predict_proba(const Model& model, std::span<const double> x) {
  return sigmoid_value(raw_score(model, x));
}

inline double mean_logloss(const Model& model, const Dataset& data) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.n_rows(); ++i)
    total += logloss_from_score(raw_score(model, data.rows[i]), data.labels[i]);
  return total / static_cast<double>(data.n_rows());
}

inline double accuracy(const Model& model, const Dataset& data) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const int pred = raw_score(model, data.rows[i]) >= 0.0 ? 1 : 0;
    hits += pred == data.labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(data.n_rows());
}

// -------- versioned JSON serialization --------
// Round trips are exact for all finite parameters (shortest-round-trip floats).

inline nlohmann::json model_to_json(const Model& model) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  if (const auto* linear = std::get_if<LinearModel>(&model)) {
    doc["type"] = "l1_logistic";
    doc["n_features"] = linear->weights.size();
    doc["weights"] = linear->weights;
    doc["intercept"] = linear->intercept;
    doc["lambda"] = linear->lambda;
    if (linear->standardization) {
      doc["standardization"] = {{"mean", linear->standardization->mean},
                                {"scale", linear->standardization->scale}};
    } else {
      doc["standardization"] = nullptr;
    }
  } else if (const auto* trees = std::get_if<TreeEnsemble>(&model)) {
    doc["type"] = "gbt";
    doc["n_features"] = trees->n_features;
    doc["base_score"] = trees->base_score;
    doc["learning_rate"] = trees->learning_rate;
    doc["reg_lambda"] = trees->reg_lambda;
    nlohmann::json tree_list = nlohmann::json::array();
    for (const auto& tree : trees->trees) {
      nlohmann::json nodes = nlohmann::json::array();
      for (const auto& node : tree.nodes)
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right},
                         {"weight", node.leaf_weight}});
      tree_list.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(tree_list);
  } else {
    const auto& net = std::get<NeuralNet>(model);
    doc["type"] = "nn";
    doc["n_features"] = net.n_features;
    nlohmann::json layer_list = nlohmann::json::array();
    for (const auto& layer : net.layers) {
      if (const auto* dense = std::get_if<DenseLayer>(&layer))
        layer_list.push_back(
            {{"kind", "dense"}, {"weights", dense->weights}, {"bias", dense->bias}});
      else if (const auto* conv = std::get_if<Conv1DLayer>(&layer))
        layer_list.push_back(
            {{"kind", "conv1d"}, {"kernels", conv->kernels}, {"bias", conv->bias}});
      else
        layer_list.push_back({{"kind", "relu"}});
    }
    doc["layers"] = std::move(layer_list);
  }
  return doc;
}

inline Model model_from_json(const nlohmann::json& doc) {
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
    throw Error("unsupported model schema version");
  const std::string type = doc.at("type").get<std::string>();
  if (type == "l1_logistic") {
    LinearModel model;
    model.weights = doc.at("weights").get<Vector>();
    model.intercept = doc.at("intercept").get<double>();
    model.lambda = doc.at("lambda").get<double>();
    if (doc.contains("standardization") && !doc["standardization"].is_null())
      model.standardization = StandardizationParams{
          doc["standardization"].at("mean").get<Vector>(),
          doc["standardization"].at("scale").get<Vector>()};
    return model;
  }
  if (type == "gbt") {
    TreeEnsemble model;
    model.n_features = doc.at("n_features").get<std::size_t>();
    model.base_score = doc.at("base_score").get<double>();
    model.learning_rate = doc.at("learning_rate").get<double>();
    model.reg_lambda = doc.at("reg_lambda").get<double>();
    for (const auto& tree_doc : doc.at("trees")) {
      Tree tree;
      for (const auto& node_doc : tree_doc.at("nodes")) {
        TreeNode node;
        node.feature = node_doc.at("feature").get<int>();
        node.threshold = node_doc.at("threshold").get<double>();
        node.left = node_doc.at("left").get<int>();
        node.right = node_doc.at("right").get<int>();
        node.leaf_weight = node_doc.at("weight").get<double>();
        tree.nodes.push_back(node);
      }
      model.trees.push_back(std::move(tree));
    }
    return model;
  }
  if (type == "nn") {
    NeuralNet net;
    net.n_features = doc.at("n_features").get<std::size_t>();
    for (const auto& layer_doc : doc.at("layers")) {
      const std::string kind = layer_doc.at("kind").get<std::string>();
      if (kind == "dense")
        net.layers.emplace_back(DenseLayer{layer_doc.at("weights").get<Matrix>(),
                                           layer_doc.at("bias").get<Vector>()});
      else if (kind == "conv1d")
        net.layers.emplace_back(Conv1DLayer{layer_doc.at("kernels").get<Matrix>(),
                                            layer_doc.at("bias").get<Vector>()});
      else if (kind == "relu")
        net.layers.emplace_back(ReluLayer{});
      else
        throw Error("unknown layer kind: " + kind);
    }
    return net;
  }
  throw Error("unknown model type: " + type);
}

}  // namespace concord
