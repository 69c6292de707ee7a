#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace concord;

namespace {

std::vector<double*> parameter_pointers(NeuralNet& net) {
  std::vector<double*> params;
  NeuralNet shadow = net;
  for_each_param_pair(net, shadow, [&](double& p, double&) { params.push_back(&p); });
  return params;
}

std::vector<double> gradient_values(const NeuralNet& net, const Matrix& rows,
                                    const std::vector<int>& labels) {
  NeuralNet work = net;
  NeuralNet grads;
  loss_and_gradients(work, rows, labels, grads);
  std::vector<double> values;
  for_each_param_pair(grads, work, [&](double& g, double&) { values.push_back(g); });
  return values;
}

void check_gradients_against_finite_differences(NeuralNet& net, const Matrix& rows,
                                                const std::vector<int>& labels) {
  const auto params = parameter_pointers(net);
  const auto grads = gradient_values(net, rows, labels);
  REQUIRE(params.size() == grads.size());
  NeuralNet dummy;
  const double h = 1e-5;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = *params[k];
    *params[k] = saved + h;
    const double up = loss_and_gradients(net, rows, labels, dummy);
    *params[k] = saved - h;
    const double down = loss_and_gradients(net, rows, labels, dummy);
    *params[k] = saved;
    const double fd = (up - down) / (2.0 * h);
    CHECK(std::abs(grads[k] - fd) < 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

}  // namespace

TEST_CASE("zero-initialized network scores 0 and predicts 0.5") {
  const NeuralNet net = build_network(3, {LayerSpec::dense(4), LayerSpec::relu(), LayerSpec::dense(1)});
  CHECK(network_raw_score(net, Vector{1.0, -2.0, 0.5}) == 0.0);
  CHECK(predict_proba(net, Vector{1.0, -2.0, 0.5}) == 0.5);
}

TEST_CASE("conv1d forward matches the hand computation") {
  NeuralNet net;
  net.n_features = 3;
  net.layers.push_back(Conv1DLayer{{{1.0, 2.0}}, {0.5}});
  net.layers.push_back(DenseLayer{{{1.0, 1.0}}, {0.0}});
  const auto acts = forward_activations(net, Vector{1.0, 2.0, 3.0});
  REQUIRE(acts.size() == 3);
  REQUIRE(acts[1].size() == 2);
  CHECK(acts[1][0] == 5.5);   // 1*1 + 2*2 + 0.5
  CHECK(acts[1][1] == 8.5);   // 1*2 + 2*3 + 0.5
  CHECK(acts[2][0] == 14.0);
}

TEST_CASE("two-filter conv layout is filter-major") {
  NeuralNet net;
  net.n_features = 3;
  net.layers.push_back(Conv1DLayer{{{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0}});
  net.layers.push_back(DenseLayer{{{0.0, 0.0, 0.0, 0.0}}, {0.0}});
  const auto acts = forward_activations(net, Vector{4.0, 5.0, 6.0});
  // filter 0 echoes positions 0..1, filter 1 echoes positions 1..2
  CHECK(acts[1] == Vector{4.0, 5.0, 5.0, 6.0});
}

TEST_CASE("build_network validates shapes") {
  CHECK_THROWS_WITH(build_network(3, {LayerSpec::dense(4)}),
                    Catch::Matchers::ContainsSubstring("single raw-score output"));
  CHECK_THROWS_AS(build_network(2, {LayerSpec::conv1d(1, 5), LayerSpec::dense(1)}), Error);
  const NeuralNet ok =
      build_network(5, {LayerSpec::conv1d(2, 3), LayerSpec::relu(), LayerSpec::dense(1)});
  CHECK(ok.n_features == 5);
  CHECK_THROWS_AS(network_raw_score(ok, Vector{1.0, 2.0}), Error);
}

TEST_CASE("init_network draws within the fan-in bound, zero biases") {
  NeuralNet net = build_network(6, {LayerSpec::dense(8), LayerSpec::relu(), LayerSpec::dense(1)});
  init_network(net, 42);
  const auto& first = std::get<DenseLayer>(net.layers[0]);
  const double bound = 1.0 / std::sqrt(6.0);
  bool any_nonzero = false;
  for (const auto& row : first.weights) {
    for (double w : row) {
      CHECK(std::abs(w) <= bound);
      any_nonzero = any_nonzero || w != 0.0;
    }
  }
  CHECK(any_nonzero);
  for (double b : first.bias) CHECK(b == 0.0);

  NeuralNet again = build_network(6, {LayerSpec::dense(8), LayerSpec::relu(), LayerSpec::dense(1)});
  init_network(again, 42);
  CHECK(std::get<DenseLayer>(again.layers[0]).weights == first.weights);
  NeuralNet other = build_network(6, {LayerSpec::dense(8), LayerSpec::relu(), LayerSpec::dense(1)});
  init_network(other, 43);
  CHECK(std::get<DenseLayer>(other.layers[0]).weights != first.weights);
}

TEST_CASE("analytic gradients match finite differences on a dense net") {
  Rng rng(2001);
  const Dataset data = test_support::random_dataset(rng, 8, 5);
  NeuralNet net =
      build_network(5, {LayerSpec::dense(4), LayerSpec::relu(), LayerSpec::dense(1)});
  init_network(net, 7);
  check_gradients_against_finite_differences(net, data.rows, data.labels);
}

TEST_CASE("analytic gradients match finite differences through conv") {
  Rng rng(2002);
  const Dataset data = test_support::random_dataset(rng, 8, 8);
  NeuralNet net = build_network(
      8, {LayerSpec::conv1d(2, 3), LayerSpec::relu(), LayerSpec::dense(4), LayerSpec::relu(),
          LayerSpec::dense(1)});
  init_network(net, 13);
  check_gradients_against_finite_differences(net, data.rows, data.labels);
}

TEST_CASE("training lowers the loss on separable data") {
  Dataset data;
  data.features = {FeatureSpec{"a", FeatureKind::numeric, false, -3, 3},
                   FeatureSpec{"b", FeatureKind::numeric, false, -3, 3}};
  Rng rng(99);
  for (int i = 0; i < 120; ++i) {
    const double a = rng.next_normal(), b = rng.next_normal();
    data.rows.push_back({a, b});
    data.labels.push_back(a + b > 0 ? 1 : 0);
  }
  const std::vector<LayerSpec> arch{LayerSpec::dense(8), LayerSpec::relu(), LayerSpec::dense(1)};
  TrainConfig cfg;
  cfg.seed = 5;
  cfg.step_size = 0.05;
  cfg.max_iterations = 0;
  const NeuralNet initial = train_nn(data, arch, cfg);
  cfg.max_iterations = 200;
  std::vector<double> trace;
  const NeuralNet trained = train_nn(data, arch, cfg, &trace);
  CHECK(mean_logloss(trained, data) < mean_logloss(initial, data));
  REQUIRE(trace.size() == 200);
  CHECK(trace.back() < trace.front());
}

TEST_CASE("nn training is deterministic in the seed") {
  Rng rng(303);
  const Dataset data = test_support::random_dataset(rng, 40, 3);
  const std::vector<LayerSpec> arch{LayerSpec::dense(6), LayerSpec::relu(), LayerSpec::dense(1)};
  TrainConfig cfg;
  cfg.seed = 11;
  cfg.max_iterations = 30;
  cfg.step_size = 0.05;
  NeuralNet a = train_nn(data, arch, cfg);
  NeuralNet b = train_nn(data, arch, cfg);
  bool equal = true;
  for_each_param_pair(a, b, [&](double& x, double& y) { equal = equal && x == y; });
  CHECK(equal);
}
