#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "concord/error.hpp"

namespace concord {

using Vector = std::vector<double>;
using Matrix = std::vector<Vector>;

inline Matrix identity_matrix(std::size_t n) {
  Matrix m(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline bool is_square(const Matrix& a) {
  for (const auto& row : a)
    if (row.size() != a.size()) return false;
  return true;
}

inline bool is_symmetric_unit_diagonal(const Matrix& a, double tol = 1e-9) {
  if (!is_square(a)) return false;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(a[i][i] - 1.0) > tol) return false;
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a[i][j] - a[j][i]) > tol) return false;
  }
  return true;
}

/// Lower-triangular Cholesky factor of a symmetric positive-semidefinite
/// matrix. Pivots in [-tol, 0] are treated as exact zeros so that
/// rank-deficient correlation matrices (e.g. perfectly duplicated features)
/// factor cleanly; a pivot below -tol raises Error.
inline Matrix cholesky_psd(const Matrix& a, double tol = 1e-8) {
  const std::size_t n = a.size();
  Matrix lower(n, Vector(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a[j][j];
    for (std::size_t k = 0; k < j; ++k) pivot -= lower[j][k] * lower[j][k];
    if (pivot < -tol) throw Error("matrix is not positive semidefinite");
    const double diag = pivot > 0.0 ? std::sqrt(pivot) : 0.0;
    lower[j][j] = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= lower[i][k] * lower[j][k];
      lower[i][j] = diag > 1e-12 ? s / diag : 0.0;
    }
  }
  return lower;
}

inline Vector column_means(const Matrix& rows, std::size_t n_cols) {
  Vector means(n_cols, 0.0);
  if (rows.empty()) return means;
  for (const auto& row : rows)
    for (std::size_t j = 0; j < n_cols; ++j) means[j] += row[j];
  for (auto& m : means) m /= static_cast<double>(rows.size());
  return means;
}

}  // namespace concord
