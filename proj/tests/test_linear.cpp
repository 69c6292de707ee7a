#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace concord;

namespace {

double deactivation_threshold(const Dataset& data) {
  double mean = 0.0;
  for (int y : data.labels) mean += y;
  mean /= static_cast<double>(data.n_rows());
  double best = 0.0;
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    double g = 0.0;
    for (std::size_t i = 0; i < data.n_rows(); ++i)
      g += data.rows[i][j] * (data.labels[i] - mean);
    best = std::max(best, std::abs(g / static_cast<double>(data.n_rows())));
  }
  return best;
}

}  // namespace

TEST_CASE("lambda above the deactivation threshold zeroes every weight") {
  Rng rng(301);
  const Dataset data = test_support::random_dataset(rng, 60, 4);
  const double threshold = deactivation_threshold(data);
  const LinearModel model = train_l1_logistic(data, threshold * 1.01);
  for (double w : model.weights) CHECK(w == 0.0);

  double mean = 0.0;
  for (int y : data.labels) mean += y;
  mean /= static_cast<double>(data.n_rows());
  CHECK_THAT(model.intercept, Catch::Matchers::WithinAbs(std::log(mean / (1.0 - mean)), 1e-6));
}

TEST_CASE("positively correlated single feature gets a positive weight") {
  Dataset data;
  data.features = {FeatureSpec{"x", FeatureKind::numeric, false, -2, 2}};
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.next_normal();
    data.rows.push_back({x});
    data.labels.push_back(rng.next_double() < sigmoid_value(2.0 * x) ? 1 : 0);
  }
  const LinearModel model = train_l1_logistic(data, 0.01);
  CHECK(model.weights[0] > 0.0);

  // sign oracle: the fitted objective beats every non-positive grid weight
  const double fitted =
      test_support::reference_l1_objective(data, model.weights, model.intercept, 0.01);
  for (double w = -3.0; w <= 0.0; w += 0.25) {
    CHECK(fitted <
          test_support::reference_l1_objective(data, {w}, model.intercept, 0.01) + 1e-9);
  }
}

TEST_CASE("d = 2 solution matches a refined grid search") {
  Rng rng(23);
  const Dataset data = test_support::random_dataset(rng, 80, 2);
  const double lambda = 0.05;
  const LinearModel model = train_l1_logistic(data, lambda);
  const double fitted =
      test_support::reference_l1_objective(data, model.weights, model.intercept, lambda);
  const double grid_best = test_support::grid_search_min_2d(
      [&](double w1, double w2) {
        return test_support::reference_l1_objective(data, {w1, w2}, model.intercept, lambda);
      },
      -5.0, 5.0);
  CHECK(std::abs(fitted - grid_best) < 1e-6);
}

TEST_CASE("penalized objective never increases across iterations") {
  Rng rng(41);
  const Dataset data = test_support::random_dataset(rng, 50, 3);
  std::vector<double> trace;
  train_l1_logistic(data, 0.02, {}, &trace);
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("stronger regularization shrinks the weight mass") {
  Rng rng(67);
  const Dataset data = test_support::random_dataset(rng, 70, 4);
  double previous = std::numeric_limits<double>::infinity();
  for (const double lambda : {0.001, 0.01, 0.05, 0.2}) {
    const LinearModel model = train_l1_logistic(data, lambda);
    double mass = 0.0;
    for (double w : model.weights) mass += std::abs(w);
    CHECK(mass <= previous + 1e-8);
    previous = mass;
  }
}

TEST_CASE("training is deterministic") {
  Rng rng(71);
  const Dataset data = test_support::random_dataset(rng, 40, 3);
  const LinearModel a = train_l1_logistic(data, 0.01);
  const LinearModel b = train_l1_logistic(data, 0.01);
  CHECK(a.weights == b.weights);
  CHECK(a.intercept == b.intercept);
}

TEST_CASE("lasso rejects bad inputs") {
  Dataset empty;
  CHECK_THROWS_AS(train_l1_logistic(empty, 0.01), Error);
  Rng rng(3);
  const Dataset data = test_support::random_dataset(rng, 10, 2);
  CHECK_THROWS_AS(train_l1_logistic(data, -0.5), Error);
}

TEST_CASE("logloss_from_score is stable at extreme scores") {
  CHECK_THAT(logloss_from_score(0.0, 1), Catch::Matchers::WithinAbs(std::log(2.0), 1e-12));
  CHECK(logloss_from_score(500.0, 1) < 1e-12);
  CHECK(logloss_from_score(-500.0, 0) < 1e-12);
  CHECK(logloss_from_score(500.0, 0) >= 500.0);
  CHECK(std::isfinite(logloss_from_score(-745.0, 1)));
}
