#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "concord/attribution.hpp"
#include "concord/dtd.hpp"
#include "concord/error.hpp"
#include "concord/model.hpp"
#include "concord/shapley.hpp"

namespace concord {

/// Coefficient attribution against the background mean; matches exact
/// Shapley on linear models.
inline AttributionVector linear_attribute(const LinearModel& model, std::span<const double> x,
                                          const Background& background) {
  if (x.size() != model.weights.size()) throw Error("instance dimension does not match model");
  if (background.rows.empty()) throw Error("linear attribution needs a non-empty background");
  const Vector means = column_means(background.rows, x.size());
  AttributionVector result;
  result.values.resize(x.size());
  double score = model.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) {
    result.values[j] = model.weights[j] * (x[j] - means[j]);
    score += model.weights[j] * x[j];
  }
  result.explained_quantity = score;
  return result;
}

struct ExplainOptions {
  std::size_t permutations = 2000;
  std::uint64_t seed = 0;
  std::optional<std::pair<Vector, Vector>> bounds;
};

inline AttributionMatrix explain_dataset(const Model& model, const Dataset& data,
                                         ExplainerKind kind, const Background& background,
                                         const ExplainOptions& options = {},
                                         DtdStats* stats = nullptr) {
  AttributionMatrix matrix;
  matrix.kind = kind;
  matrix.feature_names = data.feature_names();
  matrix.rows.reserve(data.n_rows());

  if (kind == ExplainerKind::dtd && !std::holds_alternative<NeuralNet>(model))
    throw Error("dtd explains neural network models only");
  if (kind == ExplainerKind::linear_coef && !std::holds_alternative<LinearModel>(model))
    throw Error("linear_coef explains linear models only");

  Vector lower, upper;
  if (kind == ExplainerKind::dtd) {
    if (options.bounds) {
      lower = options.bounds->first;
      upper = options.bounds->second;
    } else {
      for (const auto& feature : data.features) {
        lower.push_back(feature.observed_min);
        upper.push_back(feature.observed_max);
      }
    }
  }

  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const auto& x = data.rows[i];
    switch (kind) {
      case ExplainerKind::shapley_exact:
        matrix.rows.push_back(shapley_exact(model, x, background));
        break;
      case ExplainerKind::shapley_sampled:
        matrix.rows.push_back(shapley_sampled(model, x, background, options.permutations,
                                              derive_seed(options.seed, "row", i)));
        break;
      case ExplainerKind::dtd:
        matrix.rows.push_back(dtd_attribute(std::get<NeuralNet>(model), x, lower, upper, stats));
        break;
      case ExplainerKind::linear_coef:
        matrix.rows.push_back(linear_attribute(std::get<LinearModel>(model), x, background));
        break;
    }
  }
  return matrix;
}

}  // namespace concord
