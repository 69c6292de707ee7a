#pragma once

#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "concord/attribution.hpp"
#include "concord/error.hpp"
#include "concord/model.hpp"
#include "concord/rng.hpp"

namespace concord {

/// Interventional value: members of the coalition keep x, the rest are
/// replaced by each background row in turn; scores are averaged.
inline double coalition_value(const Model& model, std::span<const double> x, std::uint32_t mask,
                              const Background& background) {
  if (background.rows.empty()) throw Error("coalition value needs a non-empty background");
  const std::size_t d = x.size();
  bool full = true;
  for (std::size_t j = 0; j < d && full; ++j) full = (mask >> j) & 1u;
  if (full) return raw_score(model, x);
  Vector composite(d);
  double total = 0.0;
  for (const auto& ref : background.rows) {
    for (std::size_t j = 0; j < d; ++j)
      composite[j] = (mask >> j) & 1u ? x[j] : ref[j];
    total += raw_score(model, composite);
  }
  return total / static_cast<double>(background.rows.size());
}

namespace detail {

inline std::vector<double> shapley_weights(std::size_t d) {
  // w[k] = 1 / (d * C(d-1, k)); the coalition-size weights of the exact formula.
  std::vector<double> weights(d);
  double binom = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    weights[k] = 1.0 / (static_cast<double>(d) * binom);
    binom = binom * static_cast<double>(d - 1 - k) / static_cast<double>(k + 1);
  }
  return weights;
}

}  // namespace detail

inline AttributionVector shapley_exact(const Model& model, std::span<const double> x,
                                       const Background& background) {
  const std::size_t d = x.size();
  if (d == 0) throw Error("cannot attribute over zero features");
  if (d > 20)
    throw Error("exact Shapley enumeration is limited to 20 features; use shapley_sampled");
  if (d != model_dimension(model)) throw Error("instance dimension does not match model");

  const std::uint32_t full = d == 32 ? 0xffffffffu : (1u << d) - 1u;
  std::vector<double> values(static_cast<std::size_t>(full) + 1);
  for (std::uint32_t mask = 0; mask <= full; ++mask)
    values[mask] = coalition_value(model, x, mask, background);

  const std::vector<double> weights = detail::shapley_weights(d);
  AttributionVector result;
  result.values.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const std::uint32_t bit = 1u << j;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask & bit) continue;
      const std::size_t k = static_cast<std::size_t>(std::popcount(mask));
      result.values[j] += weights[k] * (values[mask | bit] - values[mask]);
    }
  }
  result.explained_quantity = values[full];
  return result;
}

/// Monte Carlo estimate over random feature orderings. Each ordering's
/// marginal contributions telescope to v(full) - v(empty), so efficiency
/// holds exactly for any permutation count.
inline AttributionVector shapley_sampled(const Model& model, std::span<const double> x,
                                         const Background& background, std::size_t permutations,
                                         std::uint64_t seed) {
  const std::size_t d = x.size();
  if (d == 0) throw Error("cannot attribute over zero features");
  if (d > 32) throw Error("sampled Shapley supports at most 32 features");
  if (d != model_dimension(model)) throw Error("instance dimension does not match model");
  if (permutations == 0) throw Error("permutation count must be positive");

  const bool memoize = d <= 16;
  std::vector<double> cache;
  std::vector<char> seen;
  if (memoize) {
    cache.assign(std::size_t{1} << d, 0.0);
    seen.assign(std::size_t{1} << d, 0);
  }
  auto value_of = [&](std::uint32_t mask) {
    if (memoize) {
      if (!seen[mask]) {
        cache[mask] = coalition_value(model, x, mask, background);
        seen[mask] = 1;
      }
      return cache[mask];
    }
    return coalition_value(model, x, mask, background);
  };

  Rng rng(seed);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  AttributionVector result;
  result.values.assign(d, 0.0);
  for (std::size_t p = 0; p < permutations; ++p) {
    rng.shuffle(order);
    std::uint32_t mask = 0;
    double prev = value_of(0);
    for (const std::size_t j : order) {
      mask |= 1u << j;
      const double cur = value_of(mask);
      result.values[j] += cur - prev;
      prev = cur;
    }
  }
  for (double& v : result.values) v /= static_cast<double>(permutations);
  const std::uint32_t full = d == 32 ? 0xffffffffu : (1u << d) - 1u;
  result.explained_quantity = value_of(full);
  return result;
}

}  // namespace concord
