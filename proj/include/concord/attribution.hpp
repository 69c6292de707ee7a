#pragma once

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "concord/dataset.hpp"
#include "concord/error.hpp"
#include "concord/rng.hpp"

namespace concord {

/// Reference rows used to marginalize absent features.
struct Background {
  Matrix rows;
};

/// Keeps every row when n <= max_rows; otherwise a seeded uniform sample
/// without replacement, restored to ascending row order.
inline Background sample_background(const Dataset& data, std::size_t max_rows, std::uint64_t seed) {
  if (max_rows == 0) throw Error("background size must be positive");
  if (data.n_rows() == 0) throw Error("cannot sample background from an empty dataset");
  Background bg;
  if (data.n_rows() <= max_rows) {
    bg.rows = data.rows;
    return bg;
  }
  std::vector<std::size_t> indices(data.n_rows());
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < max_rows; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(max_rows);
  std::sort(indices.begin(), indices.end());
  for (const std::size_t idx : indices) bg.rows.push_back(data.rows[idx]);
  return bg;
}

/// One instance's attributions plus the quantity they decompose.
struct AttributionVector {
  Vector values;
  double explained_quantity = 0.0;
};

enum class ExplainerKind { shapley_exact, shapley_sampled, dtd, linear_coef };

inline const char* explainer_name(ExplainerKind kind) {
  switch (kind) {
    case ExplainerKind::shapley_exact: return "shapley_exact";
    case ExplainerKind::shapley_sampled: return "shapley_sampled";
    case ExplainerKind::dtd: return "dtd";
    case ExplainerKind::linear_coef: return "linear_coef";
  }
  throw Error("unreachable explainer kind");
}

struct AttributionMatrix {
  std::vector<AttributionVector> rows;
  ExplainerKind kind = ExplainerKind::shapley_exact;
  std::vector<std::string> feature_names;
};

inline void write_attributions_csv(const AttributionMatrix& matrix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  for (std::size_t j = 0; j < matrix.feature_names.size(); ++j) {
    if (j > 0) out << ',';
    out << matrix.feature_names[j];
  }
  out << ",explained_quantity\n";
  for (const auto& row : matrix.rows) {
    for (const double v : row.values) out << detail::format_double(v) << ',';
    out << detail::format_double(row.explained_quantity) << '\n';
  }
  if (!out) throw Error("failed while writing: " + path);
}

}  // namespace concord
