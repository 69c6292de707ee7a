#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace concord;

namespace {

Dataset four_point_set() {
  Dataset data;
  data.features = {FeatureSpec{"x", FeatureKind::numeric, false, 0, 3}};
  data.rows = {{0.0}, {1.0}, {2.0}, {3.0}};
  data.labels = {0, 0, 1, 1};
  return data;
}

}  // namespace

TEST_CASE("zero rounds leaves only the base score") {
  const Dataset data = four_point_set();
  const TreeEnsemble model = train_gbt(data, 0, 3);
  CHECK(model.trees.empty());
  CHECK(model.base_score == 0.0);
  CHECK(raw_score(model, Vector{1.5}) == 0.0);
  CHECK(predict_proba(model, Vector{1.5}) == 0.5);
}

TEST_CASE("single stump matches the hand-computed split and leaf weights") {
  // p = 0.5 everywhere, so g = (0.5, 0.5, -0.5, -0.5), h = 0.25 each.
  // Split at the 1|2 midpoint: left G=1, H=0.5 -> w = -1/1.5; right mirrors it.
  const Dataset data = four_point_set();
  const TreeEnsemble model = train_gbt(data, 1, 1, {}, 0.1, 1.0);
  REQUIRE(model.trees.size() == 1);
  const Tree& tree = model.trees[0];
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == 1.5);
  const double left = tree.eval(Vector{0.0});
  const double right = tree.eval(Vector{3.0});
  CHECK_THAT(left, Catch::Matchers::WithinAbs(-1.0 / 1.5, 1e-15));
  CHECK_THAT(right, Catch::Matchers::WithinAbs(1.0 / 1.5, 1e-15));
  CHECK_THAT(raw_score(model, Vector{0.0}),
             Catch::Matchers::WithinAbs(0.1 * (-1.0 / 1.5), 1e-15));
}

TEST_CASE("uniform labels produce no splits") {
  Dataset data = four_point_set();
  data.labels = {1, 1, 1, 1};
  const TreeEnsemble model = train_gbt(data, 3, 3);
  CHECK(model.base_score == 10.0);  // log-odds of the clamped rate, clipped
  for (const Tree& tree : model.trees) {
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].is_leaf());
  }
}

TEST_CASE("training logloss is non-increasing round by round") {
  Rng rng(404);
  const Dataset data = test_support::random_dataset(rng, 150, 4);
  const TreeEnsemble full = train_gbt(data, 20, 3);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r <= full.trees.size(); ++r) {
    TreeEnsemble truncated = full;
    truncated.trees.assign(full.trees.begin(), full.trees.begin() + r);
    const double loss = mean_logloss(truncated, data);
    CHECK(loss <= previous + 1e-12);
    previous = loss;
  }
}

TEST_CASE("every leaf weight satisfies the closed form for its routed rows") {
  Rng rng(505);
  const Dataset data = test_support::random_dataset(rng, 100, 3);
  const double reg_lambda = 1.0;
  const TreeEnsemble model = train_gbt(data, 8, 3, {}, 0.1, reg_lambda);

  Vector scores(data.n_rows(), model.base_score);
  for (const Tree& tree : model.trees) {
    Vector grad(data.n_rows()), hess(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
      const double p = sigmoid_value(scores[i]);
      grad[i] = p - data.labels[i];
      hess[i] = p * (1.0 - p);
    }
    std::map<std::size_t, std::pair<double, double>> per_leaf;  // leaf node -> (G, H)
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
      const std::size_t leaf = tree.leaf_index(data.rows[i]);
      per_leaf[leaf].first += grad[i];
      per_leaf[leaf].second += hess[i];
    }
    for (const auto& [leaf, gh] : per_leaf) {
      const double expected = -gh.first / (gh.second + reg_lambda);
      CHECK_THAT(tree.nodes[leaf].leaf_weight, Catch::Matchers::WithinAbs(expected, 1e-12));
    }
    for (std::size_t i = 0; i < data.n_rows(); ++i)
      scores[i] += model.learning_rate * tree.eval(data.rows[i]);
  }
}

TEST_CASE("routing sends x[f] < threshold left") {
  Tree tree;
  tree.nodes.resize(3);
  tree.nodes[0].feature = 0;
  tree.nodes[0].threshold = 2.0;
  tree.nodes[0].left = 1;
  tree.nodes[0].right = 2;
  tree.nodes[1].leaf_weight = -1.0;
  tree.nodes[2].leaf_weight = 1.0;
  CHECK(tree.eval(Vector{1.9}) == -1.0);
  CHECK(tree.eval(Vector{2.0}) == 1.0);
  CHECK(tree.eval(Vector{2.1}) == 1.0);
}

TEST_CASE("gbt training is deterministic and rejects empty data") {
  Rng rng(606);
  const Dataset data = test_support::random_dataset(rng, 50, 2);
  const TreeEnsemble a = train_gbt(data, 5, 2);
  const TreeEnsemble b = train_gbt(data, 5, 2);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t k = 0; k < a.trees[t].nodes.size(); ++k) {
      CHECK(a.trees[t].nodes[k].threshold == b.trees[t].nodes[k].threshold);
      CHECK(a.trees[t].nodes[k].leaf_weight == b.trees[t].nodes[k].leaf_weight);
    }
  }
  Dataset empty;
  CHECK_THROWS_AS(train_gbt(empty, 1, 1), Error);
}

TEST_CASE("base score comes from the clipped label odds") {
  Dataset data = four_point_set();
  data.labels = {1, 1, 1, 0};
  const TreeEnsemble model = train_gbt(data, 0, 1);
  CHECK_THAT(model.base_score, Catch::Matchers::WithinAbs(std::log(0.75 / 0.25), 1e-12));
}
