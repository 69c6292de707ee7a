#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "concord/concord.hpp"

namespace test_support {

/// Random numeric dataset with labels drawn from a random linear-logistic
/// rule, so every column can matter.
inline concord::Dataset random_dataset(concord::Rng& rng, std::size_t n, std::size_t d) {
  concord::Dataset data;
  for (std::size_t j = 0; j < d; ++j) {
    concord::FeatureSpec f;
    f.name = "f" + std::to_string(j + 1);
    f.kind = concord::FeatureKind::numeric;
    data.features.push_back(f);
  }
  concord::Vector beta(d);
  for (auto& b : beta) b = rng.uniform(-2.0, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    concord::Vector row(d);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = rng.next_normal();
      s += beta[j] * row[j];
    }
    data.labels.push_back(rng.next_double() < concord::sigmoid_value(s) ? 1 : 0);
    data.rows.push_back(std::move(row));
  }
  concord::detail::refresh_observed_range(data);
  return data;
}

/// Fresh logloss implementation, deliberately written differently from the
/// library's (long double accumulation, direct log/exp with clamped
/// probabilities) to serve as an independent oracle.
inline double reference_l1_objective(const concord::Dataset& data, const concord::Vector& w,
                                     double b, double lambda) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    long double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += static_cast<long double>(w[j]) * data.rows[i][j];
    long double p = 1.0L / (1.0L + std::exp(-(double)s));
    if (p < 1e-15L) p = 1e-15L;
    if (p > 1.0L - 1e-15L) p = 1.0L - 1e-15L;
    total += data.labels[i] == 1 ? -std::log(static_cast<double>(p))
                                 : -std::log(static_cast<double>(1.0L - p));
  }
  long double pen = 0.0L;
  for (double wj : w) pen += std::abs(wj);
  return static_cast<double>(total / data.n_rows() + lambda * pen);
}

/// Iteratively refined dense grid search over (w, b) for 1-feature problems
/// or (w1, w2) with a fixed intercept grid for 2-feature ones.
inline double grid_search_min_2d(const std::function<double(double, double)>& f, double lo,
                                 double hi, int cells = 40, int refinements = 6) {
  double best = f(lo, hi), ax = lo, ay = lo;
  double x_lo = lo, x_hi = hi, y_lo = lo, y_hi = hi;
  for (int r = 0; r < refinements; ++r) {
    for (int i = 0; i <= cells; ++i) {
      for (int j = 0; j <= cells; ++j) {
        const double x = x_lo + (x_hi - x_lo) * i / cells;
        const double y = y_lo + (y_hi - y_lo) * j / cells;
        const double v = f(x, y);
        if (v < best) {
          best = v;
          ax = x;
          ay = y;
        }
      }
    }
    const double x_span = (x_hi - x_lo) / cells * 2, y_span = (y_hi - y_lo) / cells * 2;
    x_lo = ax - x_span;
    x_hi = ax + x_span;
    y_lo = ay - y_span;
    y_hi = ay + y_span;
  }
  return best;
}

}  // namespace test_support
